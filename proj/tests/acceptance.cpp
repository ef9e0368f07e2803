// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances and thresholds are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "iae/iae.hpp"
#include "oracles.hpp"

using namespace iae;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared planted corpus: 5 sources x 20 users, D_true = 4, 100 training and
// 20 held-out emissions of 8 infected users per source.
// ---------------------------------------------------------------------------
struct Planted {
  PlantedWorld world;
  CascadeDataset train;
  CascadeDataset test;
};

const Planted& planted() {
  static const Planted p = [] {
    auto world = generate_world(5, 20, 4, 20240501);
    auto train = emit_cascades(world, 100, 8, 1001, "train");
    auto test = emit_cascades(world, 20, 8, 2002, "test");
    return Planted{std::move(world), std::move(train), std::move(test)};
  }();
  return p;
}

TrainConfig planted_config(double lr) {
  TrainConfig cfg;
  cfg.dimension = 8;
  cfg.learning_rate = lr;
  cfg.epochs = 500;
  cfg.sampling = SamplingMode::dominant;
  cfg.seed = 7;
  return cfg;
}

Outcome margin_reproduction() {
  const double a = critical_margin(2, 4, 2.0);
  const double b = critical_margin(1, 4, 2.0);
  const auto d = parse_cascade_string("c1\t1 5 3 7 4\nc2\t1 3 5 7 4\n");
  const auto& v = d.vocabulary();
  const auto* c = build_table(d, 2.0, SamplingMode::dominant).find({*v.find("1"), *v.find("3"), *v.find("4")});
  const double avg = c ? c->avg_margin : NAN;
  const bool pass = std::abs(a - 0.74) <= 0.005 && std::abs(b - 1.32) <= 0.005 &&
                    std::abs(avg - 1.03) <= 0.005;
  return {pass, fmt("C(2,4)=%.4f C(1,4)=%.4f avg(1,3,4)=%.4f", a, b, avg)};
}

Outcome gradient_correctness() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coord(-1.0, 1.0), slack(0.1, 2.0);
  const int dims[] = {1, 2, 8};
  double worst = 0.0;
  int checked = 0;
  for (int n = 0; n < 1000; ++n) {
    const int dim = dims[n % 3];
    Vocabulary vocab;
    for (const char* t : {"s", "i", "j"}) vocab.intern(t);
    EmbeddingModel m(dim, Variant::independent, vocab);
    const UserId s{0}, i{1}, j{2};
    m.add_influence(s);
    m.add_susceptibility(s, i);
    m.add_susceptibility(s, j);
    for (double& x : m.coordinates()) x = coord(rng);
    const Combination combo{s, i, j, 1, predicted_gap(m, s, i, j) + slack(rng)};
    const auto g = accumulate_gradients(m, combo);
    if (!g) return {false, "combination unexpectedly inactive"};
    auto vec = [&](Slot sl) {
      auto p = m.point(sl);
      return std::vector<double>(p.begin(), p.end());
    };
    const auto num = oracle::numeric_gradient(vec(*m.influence_slot(s)),
                                              vec(*m.susceptibility_slot(s, i)),
                                              vec(*m.susceptibility_slot(s, j)), combo.avg_margin);
    worst = std::max({worst, oracle::relative_error(g->influence, num[0]),
                      oracle::relative_error(g->earlier, num[1]),
                      oracle::relative_error(g->later, num[2])});
    ++checked;
  }
  return {worst < 1e-6, fmt("%d combos, max relative error %.3g (< 1e-6)", checked, worst)};
}

Outcome combination_oracle() {
  std::mt19937_64 rng(7);
  int mismatches = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto d = oracle::random_small_dataset(rng, 8, 20, 6);
    for (bool dominant : {false, true}) {
      const auto got = build_table(d, 2.0, dominant ? SamplingMode::dominant : SamplingMode::full);
      const auto ref = oracle::brute_force_table(d, 2.0, dominant);
      if (got.size() != ref.size()) {
        ++mismatches;
        continue;
      }
      for (const auto& [k, row] : ref) {
        const auto& [s, u, v] = k;
        const auto* c = got.find({UserId{s}, UserId{u}, UserId{v}});
        if (!c || c->count != row.count) {
          ++mismatches;
          continue;
        }
        worst = std::max(worst, std::abs(c->avg_margin - row.avg_margin));
      }
    }
  }
  return {mismatches == 0 && worst <= 1e-12,
          fmt("200 datasets x 2 modes, %d key/count mismatches, max margin diff %.3g", mismatches,
              worst)};
}

Outcome ap_correctness() {
  Vocabulary v;
  for (const char* t : {"s", "B", "C", "D", "X", "Y"}) v.intern(t);
  RankedPrediction p;
  p.source = *v.find("s");
  double dist = 0.0;
  for (const char* t : {"B", "X", "C", "Y", "D"}) p.ranking.push_back({*v.find(t), dist += 1.0});
  const Cascade truth{"t", {*v.find("s"), *v.find("B"), *v.find("C"), *v.find("D")}};
  const double hand = average_precision(p, truth);

  std::mt19937_64 rng(99);
  std::vector<UserId> pool;
  for (std::uint32_t i = 1; i <= 50; ++i) pool.push_back(UserId{i});
  int mismatches = 0;
  for (int rep = 0; rep < 500; ++rep) {
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto rank_len = std::uniform_int_distribution<std::size_t>(0, 40)(rng);
    std::vector<UserId> ranking(pool.begin(), pool.begin() + rank_len);
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto truth_len = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    Cascade t{"r", {UserId{0}}};
    t.users.insert(t.users.end(), pool.begin(), pool.begin() + truth_len);
    RankedPrediction rp;
    rp.source = UserId{0};
    for (std::size_t i = 0; i < ranking.size(); ++i) rp.ranking.push_back({ranking[i], double(i)});
    const std::vector<UserId> infected(t.users.begin() + 1, t.users.end());
    if (average_precision(rp, t) != oracle::brute_force_ap(ranking, infected)) ++mismatches;
  }
  return {std::abs(hand - 0.7556) <= 1e-4 && mismatches == 0,
          fmt("hand example %.6f (0.7556 +/- 1e-4), %d/500 oracle mismatches", hand, mismatches)};
}

Outcome planted_recovery() {
  const auto& p = planted();
  const auto r = train(p.train, planted_config(0.01));
  if (r.history.empty()) return {false, "no epochs ran"};
  const double first = r.history.front().total_loss;
  const double last = r.history.back().total_loss;
  const auto report = evaluate(r.model, p.test);
  const auto ceiling = evaluate(p.world.ground_truth, p.test);
  const bool loss_ok = last <= 0.05 * first;
  const bool map_ok = report.map >= 0.90;
  return {loss_ok && map_ok,
          fmt("loss %.4g -> %.4g (%.2f%%, need <= 5%%) after %zu epochs; test MAP %.4f "
              "(need >= 0.90); ground-truth model MAP on the same test set %.4f",
              first, last, 100.0 * last / first, r.history.size(), report.map, ceiling.map)};
}

Outcome loss_descent() {
  const auto& p = planted();
  const auto r = train(p.train, planted_config(1e-3));
  const auto& h = r.history;
  if (h.size() < 2) return {false, "fewer than two epochs"};
  std::size_t ok = 0;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) ok += h[k + 1].total_loss <= h[k].total_loss;
  const double frac = static_cast<double>(ok) / static_cast<double>(h.size() - 1);
  const bool pass = frac >= 0.95 && h.back().total_loss < h.front().total_loss;
  return {pass, fmt("%.1f%% non-increasing pairs (need >= 95%%), loss %.4g -> %.4g", 100.0 * frac,
                    h.front().total_loss, h.back().total_loss)};
}

Outcome sampling_economy() {
  const auto& p = planted();
  const auto corpus = add_reversed_duplicates(p.train, 0.2, 31337);
  struct Run {
    std::size_t table = 0;
    double epoch_ms = 0.0;
    double map = 0.0;
  };
  auto run = [&](SamplingMode mode) {
    auto cfg = planted_config(0.01);
    cfg.sampling = mode;
    cfg.threads = 1;
    const auto table = build_table(corpus, cfg.mu, mode);
    std::mt19937_64 rng(cfg.seed);
    auto model = init_model(table, corpus.vocabulary(), cfg, rng);
    const CompiledTable compiled(model, table);
    using clock = std::chrono::steady_clock;
    clock::duration spent{};
    int epochs = 0;
    for (; epochs < cfg.epochs; ++epochs) {
      const auto t0 = clock::now();
      const auto stats = run_epoch(model, compiled, cfg.learning_rate, cfg.threads);
      spent += clock::now() - t0;
      if (stats.active_count == 0) {
        ++epochs;
        break;
      }
    }
    Run out;
    out.table = table.size();
    out.epoch_ms = std::chrono::duration<double, std::milli>(spent).count() / epochs;
    out.map = evaluate(model, p.test).map;
    return out;
  };
  const Run full = run(SamplingMode::full);
  const Run dom = run(SamplingMode::dominant);
  const bool pass = dom.table < full.table && dom.epoch_ms < full.epoch_ms &&
                    std::abs(dom.map - full.map) <= 0.05;
  return {pass, fmt("table %zu vs %zu, epoch %.3f ms vs %.3f ms, MAP %.4f vs %.4f (dominant vs "
                    "full, |dMAP| <= 0.05)",
                    dom.table, full.table, dom.epoch_ms, full.epoch_ms, dom.map, full.map)};
}

Outcome invariance_suite() {
  std::vector<std::string> failures;

  // Translation invariance per source.
  {
    const auto& p = planted();
    const auto table = build_table(p.train, 2.0, SamplingMode::dominant);
    TrainConfig cfg = planted_config(0.01);
    std::mt19937_64 rng(5);
    const auto m = init_model(table, p.train.vocabulary(), cfg, rng);
    double worst = 0.0;
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (UserId s : m.sources()) {
      auto shifted = m;
      std::vector<double> shift(cfg.dimension);
      for (double& v : shift) v = coord(rng);
      auto move = [&](Slot sl) {
        auto pt = shifted.point(sl);
        for (int k = 0; k < cfg.dimension; ++k) pt[k] += shift[k];
      };
      move(*shifted.influence_slot(s));
      for (const auto& [u, sl] : shifted.susceptibility_maps().at(s)) move(sl);
      for (const auto& [k, c] : table.entries()) {
        if (c.source != s) continue;
        const double g0 = predicted_gap(m, s, c.earlier, c.later);
        const double g1 = predicted_gap(shifted, s, c.earlier, c.later);
        worst = std::max(worst, std::abs(g0 - g1) / std::max(1.0, std::abs(g0)));
        const auto a = accumulate_gradients(m, c);
        const auto b = accumulate_gradients(shifted, c);
        if (a.has_value() != b.has_value()) {
          worst = 1.0;
          continue;
        }
        if (!a) continue;
        worst = std::max({worst, oracle::relative_error(a->influence, b->influence),
                          oracle::relative_error(a->earlier, b->earlier),
                          oracle::relative_error(a->later, b->later)});
      }
    }
    if (worst > 1e-9) failures.push_back(fmt("translation drift %.3g", worst));
  }

  // Kernel ranking equals distance ranking on 100 random models.
  {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> coord(-1.0, 1.0), tdist(0.1, 10.0);
    int bad = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const int dim = 1 + rep % 8;
      Vocabulary v;
      for (int i = 0; i < 16; ++i) v.intern("u" + std::to_string(i));
      EmbeddingModel m(dim, Variant::independent, v);
      const UserId s{0};
      m.add_influence(s);
      for (std::uint32_t u = 1; u < 16; ++u) m.add_susceptibility(s, UserId{u});
      for (double& x : m.coordinates()) x = coord(rng);
      const KernelParams kp{tdist(rng)};
      std::vector<UserId> by_kernel = m.candidates(s);
      std::stable_sort(by_kernel.begin(), by_kernel.end(), [&](UserId a, UserId b) {
        return *diffusion_kernel(m, kp, s, a) > *diffusion_kernel(m, kp, s, b);
      });
      std::vector<UserId> by_rank;
      for (const auto& r : rank_for_source(m, s).ranking) by_rank.push_back(r.user);
      bad += by_kernel != by_rank;
    }
    if (bad) failures.push_back(fmt("%d/100 kernel rankings differ", bad));
  }

  // Determinism of train/eval under fixed seeds and varying thread counts.
  {
    const auto& p = planted();
    auto cfg = planted_config(0.01);
    cfg.epochs = 60;
    std::vector<TrainResult> runs;
    for (unsigned threads : {1u, 2u, 4u, 7u}) {
      cfg.threads = threads;
      runs.push_back(train(p.train, cfg));
    }
    for (std::size_t i = 1; i < runs.size(); ++i) {
      if (!runs[i].model.same_as(runs[0].model)) failures.push_back("train differs across threads");
    }
    const auto r1 = evaluate(runs[0].model, p.test, 1);
    const auto r4 = evaluate(runs[0].model, p.test, 4);
    bool same = r1.map == r4.map;
    for (std::size_t i = 0; i < r1.per_cascade.size(); ++i) {
      same &= r1.per_cascade[i].ap == r4.per_cascade[i].ap;
    }
    if (!same) failures.push_back("eval differs across threads");
  }

  std::string detail = "translation, kernel ranking (100 models), thread determinism";
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 margin reproduction", margin_reproduction},
      {"2 gradient correctness", gradient_correctness},
      {"3 combination oracle", combination_oracle},
      {"4 AP/MAP correctness", ap_correctness},
      {"5 planted recovery", planted_recovery},
      {"6 loss descent", loss_descent},
      {"7 sampling economy", sampling_economy},
      {"8 invariance suite", invariance_suite},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
