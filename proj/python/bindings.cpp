#include "ictmc/documents.hpp"
#include "ictmc/oracle.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <tuple>

namespace py = pybind11;
using namespace ictmc;

namespace {

// A parsed model together with its envelope.
struct Model {
    ModelDocument doc;
    LowerEnvelope env;

    explicit Model(ModelDocument d) : doc(std::move(d)), env(doc.rate_set) {}

    Gamble gamble(const std::vector<double>& values) const { return Gamble(doc.states, values); }
};

std::vector<double> to_list(const Gamble& g) { return {g.values().begin(), g.values().end()}; }

} // namespace

PYBIND11_MODULE(_ictmc, m) {
    m.doc() = "Lower expectations for imprecise continuous-time Markov chains";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<StepBudgetExceeded>(m, "StepBudgetExceeded", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

    py::class_<Model>(m, "Model")
        .def_static("from_json", [](const std::string& text) { return Model(parse_model(text)); }, py::arg("text"))
        .def("to_json", [](const Model& self) { return serialize_model(self.doc); })
        .def_property_readonly("states", [](const Model& self) { return self.doc.states.labels(); })
        .def_property_readonly("kind", [](const Model& self) {
            return self.doc.rate_set.kind() == RateSetSpec::Kind::interval ? "interval" : "finite";
        })
        .def_property_readonly("norm_bound", [](const Model& self) { return self.env.norm_bound(); })
        .def("lower_apply", [](const Model& self, const std::vector<double>& f) {
            return to_list(self.env.lower_apply(self.gamble(f)));
        }, py::arg("f"))
        .def("upper_apply", [](const Model& self, const std::vector<double>& f) {
            return to_list(self.env.upper_apply(self.gamble(f)));
        }, py::arg("f"))
        .def("compute_L",
             [](const Model& self, double t, double s, const std::vector<double>& f, double epsilon, std::uint64_t cap) {
                 const Gamble g = self.gamble(f);
                 std::optional<Approximation> r;
                 {
                     py::gil_scoped_release release;
                     r.emplace(compute_L(self.env, t, s, g, epsilon, cap));
                 }
                 return std::make_tuple(to_list(r->value), r->error_bound, r->steps);
             },
             py::arg("t"), py::arg("s"), py::arg("f"), py::arg("epsilon"), py::arg("cap") = kDefaultStepCap,
             "Returns (values, error_bound, steps).")
        .def("query",
             [](const Model& self, const std::string& text, std::uint64_t cap) {
                 const QueryDocument q = parse_query(text, self.doc.states);
                 QueryOutcome out;
                 {
                     py::gil_scoped_release release;
                     out = run_query(self.doc, q, cap);
                 }
                 py::list rows;
                 for (const auto& row : out.rows) rows.append(py::make_tuple(row.history, row.value, row.bound));
                 return rows;
             },
             py::arg("text"), py::arg("cap") = kDefaultStepCap,
             "Runs a query document; one (history, value, bound) tuple per row.");

    m.def("step_count", [](double t, double s, double norm, double fvar, double epsilon) {
        return step_count(t, s, norm, fvar, epsilon);
    }, py::arg("t"), py::arg("s"), py::arg("norm"), py::arg("fvar"), py::arg("epsilon"));

    m.def("matrix_exponential", [](const std::vector<std::vector<double>>& rows, double t) {
        const auto space = StateSpace::numbered(rows.size());
        const auto p = matrix_exponential(RateMatrix(SquareMatrix(space, rows)), t);
        std::vector<std::vector<double>> out(rows.size(), std::vector<double>(rows.size()));
        for (std::size_t x = 0; x < rows.size(); ++x) {
            for (std::size_t y = 0; y < rows.size(); ++y) out[x][y] = p(x, y);
        }
        return out;
    }, py::arg("q"), py::arg("t"), "e^{Qt} by uniformization.");

    m.def("format_number", &format_number, py::arg("value"));
}
