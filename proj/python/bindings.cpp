#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>

#include "miselbo/approximations.hpp"
#include "miselbo/errors.hpp"
#include "miselbo/estimators.hpp"
#include "miselbo/experiments.hpp"
#include "miselbo/rng.hpp"
#include "miselbo/targets.hpp"
#include "miselbo/training.hpp"

namespace py = pybind11;
using namespace miselbo;

namespace {

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ensembles of variational approximations and the MISELBO estimator family";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<FitDivergenceError>(m, "FitDivergenceError", PyExc_RuntimeError);

  py::class_<RandomStream>(m, "RandomStream")
      .def("normal", &RandomStream::normal)
      .def("normals", &RandomStream::normals, py::arg("n"))
      .def("uniform", &RandomStream::uniform);
  m.def("derive_stream",
        [](std::uint64_t root_seed, const std::string& stream_id) {
          return derive_stream(root_seed, stream_id);
        },
        py::arg("root_seed"), py::arg("stream_id"));

  py::class_<Target>(m, "Target")
      .def_property_readonly("dim", &Target::dim)
      .def_property_readonly("name", &Target::name)
      .def_property_readonly("log_normalizer", &Target::log_normalizer)
      .def("log_density",
           [](const Target& t, const std::vector<double>& z) { return t.log_density(as_span(z)); },
           py::arg("z"))
      .def("gradient", [](const Target& t, const std::vector<double>& z) {
        std::vector<double> grad(z.size());
        target_gradient(t, as_span(z), grad);
        return grad;
      });
  m.def("make_setting", [](const std::string& id) { return make_setting(id); }, py::arg("id"));
  m.def("make_gaussian_mixture",
        [](std::vector<double> weights, std::vector<std::vector<double>> means,
           std::vector<double> sigmas) {
          return make_gaussian_mixture({std::move(weights), std::move(means), std::move(sigmas)});
        },
        py::arg("weights"), py::arg("means"), py::arg("sigmas"));

  py::class_<GaussianApprox>(m, "GaussianApprox")
      .def(py::init([](std::vector<double> mean, std::vector<double> sigma, bool train_mean,
                       bool train_sigma) {
             return GaussianApprox{std::move(mean), std::move(sigma), train_mean, train_sigma};
           }),
           py::arg("mean"), py::arg("sigma"), py::arg("train_mean") = true,
           py::arg("train_sigma") = false)
      .def_readonly("mean", &GaussianApprox::mean)
      .def_readonly("sigma", &GaussianApprox::scale)
      .def("log_density", [](const GaussianApprox& g, const std::vector<double>& z) {
        return g.log_density(as_span(z));
      });

  py::class_<HierarchicalApprox>(m, "HierarchicalApprox")
      .def(py::init([](double mu_mean, double mu_sigma, double cond_sigma) {
             HierarchicalApprox h;
             h.mu_mean = mu_mean;
             h.mu_sigma = mu_sigma;
             h.cond_sigma = cond_sigma;
             return h;
           }),
           py::arg("mu_mean") = 10.0, py::arg("mu_sigma") = 1.0, py::arg("cond_sigma") = 1.0)
      .def_readonly("mu_mean", &HierarchicalApprox::mu_mean)
      .def_readonly("mu_sigma", &HierarchicalApprox::mu_sigma)
      .def_readonly("cond_sigma", &HierarchicalApprox::cond_sigma)
      .def("log_density", [](const HierarchicalApprox& h, const std::vector<double>& z) {
        return h.log_density(as_span(z));
      });

  py::class_<Ensemble>(m, "Ensemble")
      .def(py::init([](const Target& target, const std::vector<std::pair<std::string, Approximation>>& members) {
             std::vector<Member> converted;
             converted.reserve(members.size());
             for (const auto& [label, approx] : members) converted.push_back({label, approx});
             return Ensemble(target, std::move(converted));
           }),
           py::arg("target"), py::arg("members"))
      .def_property_readonly("size", &Ensemble::size)
      .def_property_readonly("dim", &Ensemble::dim)
      .def_property_readonly("labels",
                             [](const Ensemble& e) {
                               std::vector<std::string> labels;
                               for (const auto& m : e.members()) labels.push_back(m.label);
                               return labels;
                             })
      .def("member_log_density",
           [](const Ensemble& e, std::size_t i, const std::vector<double>& z) {
             return e.member_log_density(i, as_span(z));
           })
      .def("mixture_log_density", [](const Ensemble& e, const std::vector<double>& z) {
        return e.mixture_log_density(as_span(z));
      });

  py::class_<SampleBatch>(m, "SampleBatch")
      .def_readonly("S", &SampleBatch::S)
      .def_readonly("L", &SampleBatch::L)
      .def_readonly("dim", &SampleBatch::dim)
      .def_readonly("labels", &SampleBatch::labels)
      .def_readonly("z", &SampleBatch::z)
      .def_readonly("log_q", &SampleBatch::log_q)
      .def_readonly("log_p", &SampleBatch::log_p);
  m.def("draw_batch",
        [](const Ensemble& ensemble, std::size_t L, std::uint64_t seed, std::size_t replicate,
           const std::string& stream_id) {
          return draw_batch(ensemble, L, {seed, stream_id}, replicate);
        },
        py::arg("ensemble"), py::arg("L"), py::arg("seed") = 0, py::arg("replicate") = 0,
        py::arg("stream_id") = "");
  m.def("batch_from_tables", &batch_from_tables, py::arg("labels"), py::arg("L"),
        py::arg("log_q"), py::arg("log_p"));

  py::class_<EstimateConfig>(m, "EstimateConfig")
      .def_readonly("S", &EstimateConfig::S)
      .def_readonly("L", &EstimateConfig::L)
      .def_readonly("n_replicates", &EstimateConfig::n_replicates)
      .def_readonly("seed", &EstimateConfig::seed);
  py::class_<BoundEstimate>(m, "BoundEstimate")
      .def_readonly("value", &BoundEstimate::value)
      .def_readonly("std_error", &BoundEstimate::std_error)
      .def_readonly("config", &BoundEstimate::config)
      .def("__repr__", [](const BoundEstimate& b) {
        return "BoundEstimate(value=" + std::to_string(b.value) +
               ", std_error=" + std::to_string(b.std_error) + ")";
      });

  m.def("elbo", &estimators::elbo, py::arg("batch"), py::arg("member"));
  m.def("iwelbo", &estimators::iwelbo, py::arg("batch"), py::arg("member"), py::arg("L"));
  m.def("miselbo", &estimators::miselbo, py::arg("batch"), py::arg("L"));
  m.def("avg_elbo", &estimators::avg_elbo, py::arg("batch"));
  m.def("avg_iwelbo", &estimators::avg_iwelbo, py::arg("batch"), py::arg("L"));
  m.def("jsd", &estimators::jsd, py::arg("batch"));
  m.def("delta", &estimators::delta, py::arg("batch"), py::arg("L"));
  m.def("kl_mis", &estimators::kl_mis, py::arg("batch"));
  m.def("kl_bar", &estimators::kl_bar, py::arg("batch"));

  m.def("estimate",
        [](const Ensemble& ensemble, const std::string& estimator, std::size_t L,
           std::size_t replicates, std::uint64_t seed, std::optional<std::size_t> member) {
          return estimate_replicated(ensemble, parse_estimator(estimator), L, replicates,
                                     {seed, ""}, member);
        },
        py::arg("ensemble"), py::arg("estimator"), py::arg("L") = 1, py::arg("replicates") = 5,
        py::arg("seed") = 0, py::arg("member") = py::none());

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("label", &FitResult::label)
      .def_readonly("approx", &FitResult::approx)
      .def_readonly("elbo_trace", &FitResult::elbo_trace);

  m.def("fit_member",
        [](const Target& target, const GaussianApprox& init, const std::string& label,
           std::size_t iterations, std::size_t samples_per_iter, double lr, std::uint64_t seed) {
          FitConfig config;
          config.iterations = iterations;
          config.samples_per_iter = samples_per_iter;
          config.adam.lr = lr;
          config.seed = {seed, ""};
          return fit_member(target, init, label, config);
        },
        py::arg("target"), py::arg("init"), py::arg("label"), py::arg("iterations") = 10000,
        py::arg("samples_per_iter") = 1000, py::arg("lr") = 1e-3, py::arg("seed") = 0);

  m.def("fit_ensemble",
        [](const Target& target, const std::vector<std::pair<std::string, GaussianApprox>>& inits,
           std::size_t iterations, std::size_t samples_per_iter, double lr, std::uint64_t seed,
           bool parallel) {
          FitConfig config;
          config.iterations = iterations;
          config.samples_per_iter = samples_per_iter;
          config.adam.lr = lr;
          config.seed = {seed, ""};
          std::vector<Member> members;
          members.reserve(inits.size());
          for (const auto& [label, approx] : inits) members.push_back({label, approx});
          EnsembleFit fit = fit_ensemble(target, std::move(members), config, parallel);
          py::list out;
          for (const auto& r : fit.members) out.append(r);
          return py::make_tuple(fit.ensemble, out);
        },
        py::arg("target"), py::arg("inits"), py::arg("iterations") = 10000,
        py::arg("samples_per_iter") = 1000, py::arg("lr") = 1e-3, py::arg("seed") = 0,
        py::arg("parallel") = true);

  m.attr("__version__") = "0.1.0";
}
