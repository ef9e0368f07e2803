#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "iae/iae.hpp"

namespace py = pybind11;
using namespace iae;

namespace {

UserId lookup(const Vocabulary& v, const std::string& token) {
  const auto id = v.find(token);
  if (!id) throw py::key_error("unknown user token: " + token);
  return *id;
}

py::list cascades_of(const CascadeDataset& d) {
  py::list out;
  for (const auto& c : d.cascades()) {
    std::vector<std::string> users;
    for (UserId u : c.users) users.push_back(d.vocabulary().token(u));
    out.append(py::make_tuple(c.id, users));
  }
  return out;
}

py::dict report_dict(const EvalReport& r) {
  py::list rows;
  for (const auto& c : r.per_cascade) {
    py::dict row;
    row["id"] = c.cascade_id;
    row["ap"] = c.ap;
    row["candidates"] = c.candidate_count;
    row["unseen"] = c.unseen_count;
    row["source_known"] = c.source_known;
    rows.append(row);
  }
  py::dict d;
  d["map"] = r.map;
  d["per_cascade"] = rows;
  d["unknown_sources"] = r.unknown_sources;
  d["unseen_total"] = r.unseen_total;
  d["truth_total"] = r.truth_total;
  return d;
}

}  // namespace

PYBIND11_MODULE(_iae, m) {
  m.doc() = "Independent asymmetric embedding for cascade prediction";

  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UnknownSourceError>(m, "UnknownSourceError", PyExc_KeyError);

  py::class_<CascadeDataset>(m, "CascadeDataset")
      .def_property_readonly("cascade_count", &CascadeDataset::cascade_count)
      .def_property_readonly("user_count", &CascadeDataset::user_count)
      .def_property_readonly("cascades", &cascades_of)
      .def("to_string", [](const CascadeDataset& d) {
        std::ostringstream s;
        write_cascade_file(s, d);
        return s.str();
      })
      .def("__len__", &CascadeDataset::cascade_count);

  m.def("parse_cascades", [](const std::string& text) { return parse_cascade_string(text); },
        py::arg("text"));
  m.def("load_cascades", [](const std::string& path) { return load_cascade_file(path); },
        py::arg("path"));
  m.def("split", [](const CascadeDataset& d, double frac, std::uint64_t seed) {
    auto parts = split_dataset(d, frac, seed);
    return py::make_tuple(std::move(parts.train), std::move(parts.test));
  }, py::arg("dataset"), py::arg("test_frac") = 0.1, py::arg("seed") = 0);

  m.def("critical_margin", &critical_margin, py::arg("t_i"), py::arg("t_j"), py::arg("mu") = 2.0);
  m.def("combination_table", [](const CascadeDataset& d, double mu, const std::string& mode) {
    const auto table = build_table(d, mu, parse_sampling(mode));
    const auto& v = d.vocabulary();
    py::list out;
    for (const auto& [k, c] : table.entries()) {
      out.append(py::make_tuple(v.token(c.source), v.token(c.earlier), v.token(c.later), c.count,
                                c.avg_margin));
    }
    return out;
  }, py::arg("dataset"), py::arg("mu") = 2.0, py::arg("sampling") = "dominant");

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init([](int dimension, int epochs, double learning_rate, double mu,
                       double kernel_time, const std::string& sampling, const std::string& variant,
                       std::uint64_t seed, unsigned threads) {
             TrainConfig c;
             c.dimension = dimension;
             c.epochs = epochs;
             c.learning_rate = learning_rate;
             c.mu = mu;
             c.kernel_time = kernel_time;
             c.sampling = parse_sampling(sampling);
             c.variant = parse_variant(variant);
             c.seed = seed;
             c.threads = threads;
             c.validate();
             return c;
           }),
           py::arg("dimension") = 75, py::arg("epochs") = 100, py::arg("learning_rate") = 0.01,
           py::arg("mu") = 2.0, py::arg("kernel_time") = 1.0, py::arg("sampling") = "dominant",
           py::arg("variant") = "independent", py::arg("seed") = 0, py::arg("threads") = 0)
      .def_readwrite("dimension", &TrainConfig::dimension)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("mu", &TrainConfig::mu)
      .def_readwrite("kernel_time", &TrainConfig::kernel_time)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("threads", &TrainConfig::threads)
      .def_property("sampling", [](const TrainConfig& c) { return to_string(c.sampling); },
                    [](TrainConfig& c, const std::string& s) { c.sampling = parse_sampling(s); })
      .def_property("variant", [](const TrainConfig& c) { return to_string(c.variant); },
                    [](TrainConfig& c, const std::string& s) { c.variant = parse_variant(s); });

  py::class_<EmbeddingModel>(m, "EmbeddingModel")
      .def_property_readonly("dimension", &EmbeddingModel::dimension)
      .def_property_readonly("variant", [](const EmbeddingModel& e) { return to_string(e.variant()); })
      .def_property_readonly("influence_count", &EmbeddingModel::influence_count)
      .def_property_readonly("susceptibility_count", &EmbeddingModel::susceptibility_count)
      .def("sources", [](const EmbeddingModel& e) {
        std::vector<std::string> out;
        for (UserId s : e.sources()) out.push_back(e.vocabulary().token(s));
        return out;
      })
      .def("distance_sq", [](const EmbeddingModel& e, const std::string& s, const std::string& u) {
        return distance_sq(e, lookup(e.vocabulary(), s), lookup(e.vocabulary(), u));
      }, py::arg("source"), py::arg("user"))
      .def("kernel", [](const EmbeddingModel& e, const std::string& s, const std::string& u, double t) {
        return diffusion_kernel(e, KernelParams{t}, lookup(e.vocabulary(), s), lookup(e.vocabulary(), u));
      }, py::arg("source"), py::arg("user"), py::arg("time") = 1.0)
      .def("rank", [](const EmbeddingModel& e, const std::string& s) {
        const auto r = rank_for_source(e, lookup(e.vocabulary(), s));
        std::vector<std::pair<std::string, double>> out;
        for (const auto& u : r.ranking) out.emplace_back(e.vocabulary().token(u.user), *u.distance_sq);
        return out;
      }, py::arg("source"))
      .def("save", [](const EmbeddingModel& e, const std::string& path) { save_model_file(path, e); },
           py::arg("path"))
      .def("same_as", &EmbeddingModel::same_as);

  m.def("load_model", &load_model_file, py::arg("path"));

  m.def("train", [](const CascadeDataset& d, const TrainConfig& cfg,
                    std::function<void(int, double, std::size_t)> on_epoch) {
    std::optional<TrainResult> r;
    {
      py::gil_scoped_release release;
      r = train(d, cfg, [&](const EpochStats& s) {
        if (!on_epoch) return;
        py::gil_scoped_acquire acquire;
        on_epoch(s.epoch, s.total_loss, s.active_count);
      });
    }
    std::vector<double> losses;
    for (const auto& s : r->history) losses.push_back(s.total_loss);
    return py::make_tuple(std::move(r->model), losses, r->table_size);
  }, py::arg("dataset"), py::arg("config") = TrainConfig{}, py::arg("on_epoch") = nullptr);

  m.def("evaluate", [](const EmbeddingModel& e, const std::string& test_text, unsigned threads) {
    const auto test = parse_cascade_string(test_text, e.vocabulary());
    return report_dict(evaluate(e, test, resolve_threads(threads)));
  }, py::arg("model"), py::arg("test"), py::arg("threads") = 1,
     "Score a model on cascades given in the text cascade format.");

  m.def("synthesize", [](int sources, int users_per_source, int dim, int per_source, int len,
                         double noise, std::uint64_t seed) {
    auto world = generate_world(sources, users_per_source, dim, seed, noise);
    auto data = emit_cascades(world, per_source, len, seed ^ 0x5eedu);
    return py::make_tuple(std::move(data), std::move(world.ground_truth));
  }, py::arg("sources") = 5, py::arg("users_per_source") = 20, py::arg("dim") = 4,
     py::arg("cascades_per_source") = 100, py::arg("len") = 8, py::arg("noise") = 0.0,
     py::arg("seed") = 0);
}
