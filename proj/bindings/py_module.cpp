#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "synclaw/config.hpp"
#include "synclaw/exit_prob.hpp"
#include "synclaw/experiments.hpp"
#include "synclaw/synchro.hpp"

namespace py = pybind11;
using namespace synclaw;

PYBIND11_MODULE(_synclaw, m) {
    m.doc() = "coupled scalar conservation law laboratory";

    py::class_<Grid>(m, "Grid")
        .def_readonly("length", &Grid::length)
        .def_readonly("n_cells", &Grid::n_cells)
        .def_readonly("dx", &Grid::dx)
        .def_readonly("centers", &Grid::centers)
        .def("domain_span", &Grid::domain_span);
    m.def("build_grid", &build_grid, py::arg("length"), py::arg("n_cells"),
          py::return_value_policy::move);

    py::class_<Field>(m, "Field")
        .def_property_readonly("values", [](const Field& f) { return f.values; })
        .def("__len__", [](const Field& f) { return f.values.size(); });
    m.def("make_field", &make_field, py::arg("grid"), py::arg("fill") = 0.0,
          py::keep_alive<0, 1>());
    m.def(
        "field_from_values",
        [](const Grid& grid, const std::vector<double>& values) {
            if (static_cast<int>(values.size()) != grid.n_cells)
                throw std::invalid_argument("value count does not match the grid");
            Field f = make_field(grid);
            f.values = values;
            return f;
        },
        py::arg("grid"), py::arg("values"), py::keep_alive<0, 1>());
    m.def("sample_field",
          [](const Grid& grid, const std::function<double(double)>& fn) {
              return sample_field(grid, fn);
          },
          py::arg("grid"), py::arg("fn"), py::keep_alive<0, 1>());

    m.def("implicit_diffusion_step", &implicit_diffusion_step, py::arg("field"), py::arg("dt"),
          py::keep_alive<0, 1>());
    m.def("boundary_normal_gradient", &boundary_normal_gradient);
    m.def("lp_norm", &lp_norm, py::arg("field"), py::arg("p"));
    m.attr("P_INF") = kPInf;

    py::class_<FluxModel>(m, "FluxModel")
        .def("flux", &FluxModel::flux)
        .def("dflux", &FluxModel::dflux)
        .def("growth_exponent", &FluxModel::growth_exponent)
        .def("lipschitz_bound_on",
             [](const FluxModel& m_, double lo, double hi) {
                 return m_.lipschitz_bound_on({lo, hi});
             })
        .def_property_readonly("name", &FluxModel::name);
    m.def("burgers_model", &burgers_model);
    m.def("zero_flux_model", &zero_flux_model);
    m.def("linear_flux_model", &linear_flux_model, py::arg("speed"));
    m.def("coercive_quadratic_model", &coercive_quadratic_model, py::arg("alpha"),
          py::arg("beta"));
    m.def("secant_slope", &secant_slope, py::arg("model"), py::arg("a"), py::arg("b"));
    m.def("check_coercivity",
          [](const FluxModel& model, double lo, double hi, int n) {
              const auto rep = check_coercivity(model, {lo, hi}, n);
              return py::make_tuple(rep.pass, rep.worst_margin, rep.worst_u);
          },
          py::arg("model"), py::arg("lo"), py::arg("hi"), py::arg("n_samples") = 1001);
    m.def("check_growth",
          [](const FluxModel& model, double lo, double hi, int n) {
              return check_growth(model, {lo, hi}, n);
          },
          py::arg("model"), py::arg("lo"), py::arg("hi"), py::arg("n_samples") = 1001);

    py::class_<NoiseMode>(m, "NoiseMode")
        .def(py::init([](int index, double amplitude) {
                 return NoiseMode{index, amplitude};
             }),
             py::arg("index"), py::arg("amplitude"))
        .def_readwrite("index", &NoiseMode::index)
        .def_readwrite("amplitude", &NoiseMode::amplitude);
    py::class_<Psi0Spec>(m, "Psi0Spec")
        .def(py::init([](const std::string& time_profile, int index, double amplitude) {
                 Psi0Spec s;
                 s.time_profile = time_profile;
                 s.index = index;
                 s.amplitude = amplitude;
                 return s;
             }),
             py::arg("time_profile") = "zero", py::arg("index") = 1, py::arg("amplitude") = 0.0);
    py::class_<NoiseSpec>(m, "NoiseSpec");
    m.def("make_noise_spec",
          [](const Grid& grid, const std::vector<NoiseMode>& modes, const Psi0Spec& psi0) {
              return make_noise_spec(grid, modes, psi0);
          },
          py::arg("grid"), py::arg("modes"), py::arg("psi0"), py::keep_alive<0, 1>());
    py::class_<NoisePath>(m, "NoisePath")
        .def_readonly("seed", &NoisePath::seed)
        .def_readonly("dt", &NoisePath::dt)
        .def_readonly("n_steps", &NoisePath::n_steps)
        .def_readonly("n_modes", &NoisePath::n_modes)
        .def_readonly("increments", &NoisePath::increments);
    m.def("sample_path", &sample_path, py::arg("spec"), py::arg("seed"), py::arg("dt"),
          py::arg("n_steps"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SolverConfig::dt)
        .def_readwrite("t_final", &SolverConfig::t_final)
        .def_readwrite("cfl_safety", &SolverConfig::cfl_safety)
        .def_readwrite("norm_p", &SolverConfig::norm_p)
        .def_readwrite("state_stride", &SolverConfig::state_stride);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("norm_l1", &Trajectory::norm_l1)
        .def_readonly("norm_l2", &Trajectory::norm_l2)
        .def_readonly("norm_lp", &Trajectory::norm_lp)
        .def_readonly("norm_linf", &Trajectory::norm_linf)
        .def_property_readonly("final_state",
                               [](const Trajectory& t) { return t.final_state(); });
    m.def(
        "evolve",
        [](const Field& u0, const FluxModel& model, const NoiseSpec* noise, const NoisePath* path,
           const SolverConfig& cfg) { return evolve(u0, model, noise, path, cfg); },
        py::arg("u0"), py::arg("model"), py::arg("noise") = nullptr, py::arg("path") = nullptr,
        py::arg("cfg") = SolverConfig{});

    py::class_<PairTrajectory>(m, "PairTrajectory")
        .def_readonly("times", &PairTrajectory::times)
        .def_readonly("w_l1", &PairTrajectory::w_l1)
        .def_readonly("boundary_diss", &PairTrajectory::boundary_diss)
        .def_readonly("sup_norms", &PairTrajectory::sup_norms);
    m.def(
        "couple_evolve",
        [](const Field& u0, const Field& v0, const FluxModel& model, const NoiseSpec* noise,
           const NoisePath* path, const SolverConfig& cfg) {
            return couple_evolve(u0, v0, model, noise, path, cfg);
        },
        py::arg("u0"), py::arg("v0"), py::arg("model"), py::arg("noise") = nullptr,
        py::arg("path") = nullptr, py::arg("cfg") = SolverConfig{});

    m.def("estimate_lyapunov",
          [](const PairTrajectory& pair, double t_burn) {
              const LyapunovFit fit = estimate_lyapunov(pair, t_burn);
              py::dict out;
              out["status"] = fit.status == LyapunovFit::Status::ok
                                  ? "ok"
                                  : "synchronised below resolution";
              out["lambda_hat"] = fit.lambda_hat;
              out["stderr"] = fit.stderr_slope;
              out["t_hit"] = fit.t_hit;
              return out;
          },
          py::arg("pair"), py::arg("t_burn") = 1.0);
    m.def("kernel_mass_loss",
          [](const PairTrajectory& pair, const FluxModel& model, double t, double h, int workers) {
              const KernelMassLoss kml = kernel_mass_loss(pair, model, t, h, workers);
              py::dict out;
              out["p_hat"] = kml.p_hat;
              out["argmax_cell"] = kml.argmax_cell;
              out["max_column_mass"] = kml.max_column_mass;
              out["min_column_mass"] = kml.min_column_mass;
              return out;
          },
          py::arg("pair"), py::arg("model"), py::arg("t"), py::arg("h"), py::arg("workers") = 1);
    m.def("girsanov_bound_value", &girsanov_bound_value, py::arg("grid"), py::arg("h"),
          py::arg("b_sup"));
    m.def("simulate_exit", &simulate_exit, py::arg("pair"), py::arg("model"), py::arg("t"),
          py::arg("h"), py::arg("y0"), py::arg("n_paths"), py::arg("sde_dt"), py::arg("seed"));
    m.def("estimate_p_inf",
          [](const PairTrajectory& pair, const FluxModel& model, double t, double h, int n_starts,
             int n_paths, std::uint64_t seed, double sde_dt, int workers) {
              const ExitEstimate est =
                  estimate_p_inf(pair, model, t, h, n_starts, n_paths, seed, sde_dt, workers);
              py::dict out;
              out["p_hat"] = est.p_hat;
              out["stderr"] = est.stderr_;
              out["argmin_start"] = est.argmin_start;
              out["start_points"] = est.start_points;
              out["exit_fractions"] = est.exit_fractions;
              return out;
          },
          py::arg("pair"), py::arg("model"), py::arg("t"), py::arg("h"), py::arg("n_starts"),
          py::arg("n_paths"), py::arg("seed"), py::arg("sde_dt") = 0.0, py::arg("workers") = 1);

    m.def("run_config_text",
          [](const std::string& text, const std::string& output_root, int workers) {
              const ExperimentConfig cfg = parse_config(text);
              RunOptions opts;
              opts.output_root = output_root;
              opts.workers = workers;
              const RunResult result = run(cfg, opts);
              py::dict out;
              out["status"] = result.status;
              out["output_dir"] = result.output_dir;
              out["manifest_path"] = result.manifest_path;
              out["summary_json"] = result.summary_json;
              return out;
          },
          py::arg("text"), py::arg("output_root") = std::string("."), py::arg("workers") = 1);
    m.def("replay_manifest",
          [](const std::string& manifest_path, int workers) {
              RunOptions opts;
              opts.workers = workers;
              const ReplayResult result = replay(manifest_path, opts);
              py::dict out;
              out["pass"] = result.pass;
              out["first_mismatch_file"] = result.first_mismatch_file;
              out["detail"] = result.detail;
              return out;
          },
          py::arg("manifest_path"), py::arg("workers") = 1);
}
