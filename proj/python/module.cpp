#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srl/errors.hpp"
#include "srl/trainer.hpp"

namespace py = pybind11;
using namespace srl;

namespace {

py::dict record_to_dict(const EpisodeRecord& r) {
    py::dict d;
    d["m"] = r.m;
    d["theta"] = py::make_tuple(r.theta.theta1, r.theta.theta2, r.theta.theta3);
    d["x_bar"] = r.x_bar;
    d["linf_error"] = r.linf_error;
    d["activation_time"] = r.activation_time ? py::cast(*r.activation_time) : py::none();
    d["total_cost"] = r.total_cost;
    return d;
}

py::dict trace_to_dict(const EpisodeTrace& tr) {
    std::vector<double> x_pre;
    std::vector<double> xi_post;
    std::vector<double> eta_post;
    for (const StepRecord& s : tr.steps) {
        x_pre.push_back(s.x_pre);
        xi_post.push_back(s.xi_post);
        eta_post.push_back(s.eta_post);
    }
    py::dict d;
    d["x_pre"] = x_pre;
    d["xi_post"] = xi_post;
    d["eta_post"] = eta_post;
    d["activation_time"] = tr.activation_time;
    d["activation_step"] = tr.activation_step;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Singular-control free boundary solver and actor-critic trainer";
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def(py::init([](double mu, double sigma, double a, double c, double beta, double lambda_) {
                 ModelParams p{mu, sigma, a, c, beta, lambda_};
                 validate(p);
                 return p;
             }),
             py::arg("mu") = 0.25, py::arg("sigma") = 1.0, py::arg("a") = 0.1, py::arg("c") = 1.0,
             py::arg("beta") = 0.1, py::arg("lambda_") = 0.5)
        .def_readwrite("mu", &ModelParams::mu)
        .def_readwrite("sigma", &ModelParams::sigma)
        .def_readwrite("a", &ModelParams::a)
        .def_readwrite("c", &ModelParams::c)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("lambda_", &ModelParams::lambda);

    py::class_<DerivedConstants>(m, "DerivedConstants")
        .def_readonly("b", &DerivedConstants::b)
        .def_readonly("l", &DerivedConstants::l)
        .def_readonly("x_hat", &DerivedConstants::x_hat)
        .def_readonly("c_a", &DerivedConstants::c_a)
        .def_readonly("c_b", &DerivedConstants::c_b);

    py::class_<Theta>(m, "Theta")
        .def(py::init<double, double, double>(), py::arg("theta1"), py::arg("theta2"), py::arg("theta3"))
        .def_readwrite("theta1", &Theta::theta1)
        .def_readwrite("theta2", &Theta::theta2)
        .def_readwrite("theta3", &Theta::theta3)
        .def("__repr__", [](const Theta& t) {
            return "Theta(" + std::to_string(t.theta1) + ", " + std::to_string(t.theta2) + ", " +
                   std::to_string(t.theta3) + ")";
        });

    m.def("derive_constants", &derive_constants, py::arg("params") = ModelParams{});
    m.def("true_theta", [](const ModelParams& p) { return true_theta(derive_constants(p), p); },
          py::arg("params") = ModelParams{});

    auto bind_x = [&](const char* name, double (*fn)(double, const DerivedConstants&, const ModelParams&)) {
        m.def(name, [fn](double x, const ModelParams& p) { return fn(x, derive_constants(p), p); }, py::arg("x"),
              py::arg("params") = ModelParams{});
    };
    bind_x("phi", &phi);
    bind_x("gamma", &gamma);
    bind_x("gamma_inv", &gamma_inv);
    m.def("psi", [](double x, double q, const ModelParams& p) { return psi(x, q, derive_constants(p), p); },
          py::arg("x"), py::arg("q"), py::arg("params") = ModelParams{});
    m.def("outer_value_v",
          [](double x, double z, const ModelParams& p) { return outer_value_v(x, z, derive_constants(p), p); },
          py::arg("x"), py::arg("z"), py::arg("params") = ModelParams{});
    m.def("entropy", &entropy, py::arg("z"));

    m.def("phi_theta", &phi_theta, py::arg("x"), py::arg("theta"), py::arg("x_bar"), py::arg("c") = 1.0);
    m.def(
        "iterate_boundary",
        [](const Theta& t, double x_bar, const ModelParams& p, double alpha_pi) {
            PiConfig cfg;
            cfg.alpha_pi = alpha_pi;
            return iterate_boundary(t, x_bar, p.beta, p.c, cfg);
        },
        py::arg("theta"), py::arg("x_bar"), py::arg("params") = ModelParams{}, py::arg("alpha_pi") = 0.5);
    m.def("linf_error", [](const Theta& t, double x_bar, const ModelParams& p) { return linf_error(t, x_bar, p); },
          py::arg("theta"), py::arg("x_bar"), py::arg("params") = ModelParams{});

    m.def(
        "simulate_nonrandomized",
        [](double x0, double x_bar, double T, std::size_t N, std::uint64_t seed, std::uint64_t stream,
           const ModelParams& p) { return trace_to_dict(simulate_nonrandomized({T, N}, x0, 0.0, x_bar, p, {seed, stream})); },
        py::arg("x0"), py::arg("x_bar"), py::arg("T") = 100.0, py::arg("N") = 5000, py::arg("seed") = 0,
        py::arg("stream") = 0, py::arg("params") = ModelParams{});
    m.def(
        "simulate_randomized",
        [](double x0, double x_bar, const Theta& t, double lambda, double T, std::size_t N, std::uint64_t seed,
           std::uint64_t stream, const ModelParams& p) {
            return trace_to_dict(simulate_randomized({T, N}, x0, 0.0, 0.0, x_bar, t, p, lambda, {seed, stream}));
        },
        py::arg("x0"), py::arg("x_bar"), py::arg("theta"), py::arg("lambda_") = 0.5, py::arg("T") = 100.0,
        py::arg("N") = 5000, py::arg("seed") = 0, py::arg("stream") = 0, py::arg("params") = ModelParams{});
    m.def(
        "mc_value_estimate",
        [](double x_bar, double x0, double T, std::size_t N, std::size_t n_paths, std::uint64_t seed,
           const ModelParams& p) {
            py::gil_scoped_release release;
            const McEstimate e = mc_value_estimate(x_bar, p, x0, T, N, n_paths, seed);
            return std::make_pair(e.mean, e.std_error);
        },
        py::arg("x_bar"), py::arg("x0") = 1.0, py::arg("T") = 100.0, py::arg("N") = 5000, py::arg("n_paths") = 1000,
        py::arg("seed") = 0, py::arg("params") = ModelParams{});

    m.def(
        "train",
        [](const std::string& mode, std::size_t M, std::size_t N, double T, std::uint64_t seed, const ModelParams& p) {
            TrainConfig cfg;
            cfg.mode = parse_train_mode(mode);
            cfg.M = M;
            cfg.N = N;
            cfg.T = T;
            cfg.seed = seed;
            cfg.lambda = p.lambda;
            std::vector<EpisodeRecord> log;
            {
                py::gil_scoped_release release;
                log = run_training(cfg, p);
            }
            py::list out;
            for (const EpisodeRecord& r : log) out.append(record_to_dict(r));
            return out;
        },
        py::arg("mode") = "benchmark", py::arg("M") = 500, py::arg("N") = 5000, py::arg("T") = 100.0,
        py::arg("seed") = 0, py::arg("params") = ModelParams{});
}
