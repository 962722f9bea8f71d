#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relaybc/experiments.hpp"
#include "relaybc/json_io.hpp"
#include "relaybc/linmap.hpp"
#include "relaybc/oracle.hpp"
#include "relaybc/validate.hpp"

namespace py = pybind11;
using namespace relaybc;

PYBIND11_MODULE(_relaybc, m) {
  m.doc() = "Relay-enabled backscatter network resource allocation";

  py::class_<Coord>(m, "Coord")
      .def(py::init<>())
      .def(py::init([](double x, double y) { return Coord{x, y}; }))
      .def_readwrite("x", &Coord::x)
      .def_readwrite("y", &Coord::y);

  py::class_<NetworkConfig>(m, "NetworkConfig")
      .def(py::init<>())
      .def_static("reference", &NetworkConfig::reference)
      .def("validate", &NetworkConfig::validate)
      .def_readwrite("coord_s", &NetworkConfig::coord_s)
      .def_readwrite("coord_r", &NetworkConfig::coord_r)
      .def_readwrite("coord_d", &NetworkConfig::coord_d)
      .def_readwrite("alpha1", &NetworkConfig::alpha1)
      .def_readwrite("alpha2", &NetworkConfig::alpha2)
      .def_readwrite("alpha3", &NetworkConfig::alpha3)
      .def_readwrite("xi_sd", &NetworkConfig::xi_sd)
      .def_readwrite("xi_sr", &NetworkConfig::xi_sr)
      .def_readwrite("xi_rd", &NetworkConfig::xi_rd)
      .def_readwrite("Ts", &NetworkConfig::Ts)
      .def_readwrite("W", &NetworkConfig::W)
      .def_readwrite("sigma2", &NetworkConfig::sigma2)
      .def_readwrite("eta", &NetworkConfig::eta)
      .def_readwrite("Pc", &NetworkConfig::Pc)
      .def_readwrite("P", &NetworkConfig::P)
      .def_readwrite("Pmax", &NetworkConfig::Pmax)
      .def_readwrite("L", &NetworkConfig::L);

  py::class_<ChannelState>(m, "ChannelState")
      .def(py::init<>())
      .def_readwrite("g_sd", &ChannelState::g_sd)
      .def_readwrite("g_sr", &ChannelState::g_sr)
      .def_readwrite("g_rd", &ChannelState::g_rd)
      .def_readwrite("noise_bw", &ChannelState::noise_bw);

  py::class_<Allocation>(m, "Allocation")
      .def(py::init<>())
      .def_readwrite("M", &Allocation::M)
      .def_readwrite("N", &Allocation::N)
      .def_readwrite("P0", &Allocation::P0)
      .def_readwrite("P1", &Allocation::P1)
      .def_readwrite("beta", &Allocation::beta)
      .def_readwrite("eigenvalues", &Allocation::eigenvalues);

  py::class_<ConstraintViolation>(m, "ConstraintViolation")
      .def_readonly("name", &ConstraintViolation::name)
      .def_readonly("slack", &ConstraintViolation::slack);

  py::class_<FeasibilityConstants>(m, "FeasibilityConstants")
      .def_readonly("A", &FeasibilityConstants::A)
      .def_readonly("B", &FeasibilityConstants::B);

  m.def("channel_gains", &channel_gains, py::arg("cfg"));
  m.def("harvested_energy", &harvested_energy, py::arg("alloc"),
        py::arg("chan"), py::arg("cfg"));
  m.def("check_constraints", &check_constraints, py::arg("alloc"),
        py::arg("chan"), py::arg("cfg"), py::arg("rel_tol") = 1e-9);
  m.def("feasibility_constants", &feasibility_constants, py::arg("chan"),
        py::arg("cfg"));

  py::enum_<RateLimiter>(m, "RateLimiter")
      .value("sd_dominant", RateLimiter::sd_dominant)
      .value("relay_limited", RateLimiter::relay_limited)
      .value("destination_limited", RateLimiter::destination_limited);

  py::enum_<UpperBoundCase>(m, "UpperBoundCase")
      .value("destination_limited", UpperBoundCase::destination_limited)
      .value("decode_limited", UpperBoundCase::decode_limited)
      .value("straddling", UpperBoundCase::straddling);

  py::class_<RateBreakdown>(m, "RateBreakdown")
      .def_readonly("r_sd", &RateBreakdown::r_sd)
      .def_readonly("r_sr", &RateBreakdown::r_sr)
      .def_readonly("r_relay", &RateBreakdown::r_relay)
      .def_readonly("r_sum", &RateBreakdown::r_sum)
      .def_readonly("gamma_sd", &RateBreakdown::gamma_sd)
      .def_readonly("gamma_sr", &RateBreakdown::gamma_sr)
      .def_readonly("gamma_rd", &RateBreakdown::gamma_rd)
      .def_readonly("case_label", &RateBreakdown::case_label);

  m.def("rate_sd", &rate_sd);
  m.def("rate_sr", &rate_sr);
  m.def("rate_relay_combined", &rate_relay_combined);
  m.def("rate_sum", &rate_sum);
  m.def("rate_sum_upper", &rate_sum_upper);
  m.def("equal_time_reference", &equal_time_reference, py::arg("chan"),
        py::arg("cfg"), py::arg("beta"), py::arg("P0"), py::arg("P1"));
  m.def("classify_case", &classify_case);
  m.def("upper_bound_tight", &upper_bound_tight);

  m.def("optimal_eigenvalues", &optimal_eigenvalues, py::arg("M"),
        py::arg("N"));
  py::class_<MappingMatrix>(m, "MappingMatrix")
      .def_readonly("G", &MappingMatrix::G)
      .def("rows", &MappingMatrix::rows)
      .def("cols", &MappingMatrix::cols);
  m.def("build_mapping_matrix", &build_mapping_matrix, py::arg("M"),
        py::arg("N"));
  m.def("numeric_logdet_rate", &numeric_logdet_rate, py::arg("map"),
        py::arg("beta"), py::arg("P0"), py::arg("P1"), py::arg("chan"),
        py::arg("cfg"));
  py::class_<EigenSearchResult>(m, "EigenSearchResult")
      .def_readonly("profile", &EigenSearchResult::profile)
      .def_readonly("rate", &EigenSearchResult::rate);
  m.def("brute_force_eigen_search", &brute_force_eigen_search, py::arg("M"),
        py::arg("N"), py::arg("beta"), py::arg("P0"), py::arg("P1"),
        py::arg("chan"), py::arg("cfg"), py::arg("grid_step"));

  py::enum_<ContinuousCase>(m, "ContinuousCase")
      .value("case1_highrho", ContinuousCase::case1_highrho)
      .value("case1_lowrho", ContinuousCase::case1_lowrho)
      .value("case2", ContinuousCase::case2);

  py::class_<ContinuousSolution>(m, "ContinuousSolution")
      .def_readonly("feasible", &ContinuousSolution::feasible)
      .def_readonly("P0", &ContinuousSolution::P0)
      .def_readonly("P1", &ContinuousSolution::P1)
      .def_readonly("rho", &ContinuousSolution::rho)
      .def_readonly("beta", &ContinuousSolution::beta)
      .def_readonly("t", &ContinuousSolution::t)
      .def_readonly("branch", &ContinuousSolution::branch);

  py::class_<ScaIterate>(m, "ScaIterate")
      .def_readonly("rho", &ScaIterate::rho)
      .def_readonly("a", &ScaIterate::a)
      .def_readonly("b", &ScaIterate::b)
      .def_readonly("t", &ScaIterate::t);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("sca_tol", &SolverOptions::sca_tol)
      .def_readwrite("sca_max_iter", &SolverOptions::sca_max_iter)
      .def_readwrite("bisect_tol", &SolverOptions::bisect_tol)
      .def_readwrite("rho0", &SolverOptions::rho0)
      .def_readwrite("a0", &SolverOptions::a0);

  py::class_<SolverReport>(m, "SolverReport")
      .def_readonly("feasible", &SolverReport::feasible)
      .def_readonly("failed_stage", &SolverReport::failed_stage)
      .def_readonly("allocation", &SolverReport::allocation)
      .def_readonly("throughput", &SolverReport::throughput)
      .def_readonly("breakdown", &SolverReport::breakdown)
      .def_readonly("continuous", &SolverReport::continuous)
      .def_readonly("sca_trace", &SolverReport::sca_trace)
      .def_readonly("iterations", &SolverReport::iterations)
      .def("to_json", [](const SolverReport& rep, const NetworkConfig& cfg) {
        return report_to_json(rep, cfg).dump(2);
      });

  m.def("optimal_beta", &optimal_beta, py::arg("P0"), py::arg("chan"),
        py::arg("cfg"));
  m.def("allocate",
        [](const ChannelState& chan, const NetworkConfig& cfg,
           const SolverOptions& opts) { return allocate(chan, cfg, opts); },
        py::arg("chan"), py::arg("cfg"), py::arg("opts") = SolverOptions{});
  m.def("exhaustive_allocate",
        [](const ChannelState& chan, const NetworkConfig& cfg,
           const SolverOptions& opts) {
          return exhaustive_allocate(chan, cfg, opts);
        },
        py::arg("chan"), py::arg("cfg"), py::arg("opts") = SolverOptions{});
  m.def("timesharing_gap",
        [](const ChannelState& chan, const NetworkConfig& cfg,
           const std::vector<int>& l_list) {
          std::vector<std::pair<int, double>> out;
          for (const auto& gp : timesharing_gap(chan, cfg, l_list)) {
            out.emplace_back(gp.L, gp.gap);
          }
          return out;
        },
        py::arg("chan"), py::arg("cfg"), py::arg("L_list"));

  py::enum_<Scheme>(m, "Scheme")
      .value("proposed", Scheme::proposed)
      .value("bc_only", Scheme::bc_only)
      .value("relay_bc_fixed", Scheme::relay_bc_fixed)
      .value("opportunistic_relay_bc", Scheme::opportunistic_relay_bc)
      .value("related_continuous_upper", Scheme::related_continuous_upper);

  m.def("scheme_throughput",
        [](Scheme s, const ChannelState& chan, const NetworkConfig& cfg) {
          const SchemeResult r = scheme_throughput(s, chan, cfg);
          return py::make_tuple(r.feasible, r.throughput);
        },
        py::arg("scheme"), py::arg("chan"), py::arg("cfg"));

  m.def("load_config", &load_config, py::arg("path"));
  m.def("config_from_json", [](const std::string& text) {
    return config_from_json(nlohmann::json::parse(text));
  });

  m.def("run_validation_suites", [](std::uint64_t seed) {
    std::vector<std::pair<std::string, bool>> out;
    for (const auto& s : run_validation_suites(seed)) {
      out.emplace_back(s.name, s.pass);
    }
    return out;
  });
}
