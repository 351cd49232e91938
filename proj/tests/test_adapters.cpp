#include <cmath>

#include "c2p/adapters.hpp"
#include "c2p/grad_check.hpp"
#include "c2p/losses.hpp"
#include "doctest.h"

using namespace c2p;

namespace {

std::vector<double> random_unit(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

AnchorBank orthogonal_anchors(std::size_t k, std::size_t dim) {
  AnchorBank bank;
  for (std::size_t i = 0; i < k; ++i) {
    Tensor a({dim});
    a[i] = 1.0;
    bank.anchors.push_back(a);
    bank.class_names.push_back("c" + std::to_string(i));
  }
  return bank;
}

AnchorBank random_anchors(std::size_t k, std::size_t dim, Rng& rng) {
  AnchorBank bank;
  for (std::size_t i = 0; i < k; ++i) {
    bank.anchors.push_back(Tensor::from_vector(random_unit(dim, rng)));
    bank.class_names.push_back("c" + std::to_string(i));
  }
  return bank;
}

double plain_cos(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace

TEST_CASE("zero-shot logits") {
  std::size_t dim = 6;
  AnchorBank bank = orthogonal_anchors(4, dim);

  SUBCASE("single view equal to an anchor") {
    std::vector<Tensor> feats{bank.anchors[0]};
    auto logits = zero_shot_logits(feats, bank);
    CHECK(logits[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 1; k < 4; ++k) {
      CHECK(logits[k] == doctest::Approx(0.0).epsilon(1e-12));
    }
    CHECK(argmax(logits) == 0);
  }

  SUBCASE("duplicating the view list leaves logits unchanged") {
    Rng rng(2);
    std::vector<Tensor> feats;
    for (int v = 0; v < 3; ++v) {
      feats.push_back(Tensor::from_vector(random_unit(dim, rng)));
    }
    auto base = zero_shot_logits(feats, bank);
    std::vector<Tensor> doubled = feats;
    doubled.insert(doubled.end(), feats.begin(), feats.end());
    auto dup = zero_shot_logits(doubled, bank);
    for (std::size_t k = 0; k < base.size(); ++k) {
      CHECK(dup[k] == doctest::Approx(base[k]).epsilon(1e-12));
    }
  }

  SUBCASE("matches a direct independent evaluation") {
    Rng rng(3);
    AnchorBank rb = random_anchors(5, dim, rng);
    std::vector<std::vector<double>> feats;
    for (int v = 0; v < 4; ++v) feats.push_back(random_unit(dim, rng));
    std::vector<Tensor> tf;
    for (const auto& f : feats) tf.push_back(Tensor::from_vector(f));
    auto logits = zero_shot_logits(tf, rb);
    for (std::size_t k = 0; k < 5; ++k) {
      double expect = 0.0;
      for (const auto& f : feats) {
        expect += plain_cos(f, rb.anchors[k].values());
      }
      expect /= 4.0;
      CHECK(logits[k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  SUBCASE("cos-preserving rescaling keeps the argmax") {
    Rng rng(4);
    AnchorBank rb = random_anchors(5, dim, rng);
    std::vector<Tensor> feats;
    for (int v = 0; v < 3; ++v) {
      feats.push_back(Tensor::from_vector(random_unit(dim, rng)));
    }
    auto base = zero_shot_logits(feats, rb);
    std::vector<Tensor> scaled = feats;
    for (Tensor& f : scaled) {
      for (std::size_t i = 0; i < f.size(); ++i) f[i] *= 3.7;
    }
    auto after = zero_shot_logits(scaled, rb);
    CHECK(argmax(after) == argmax(base));
    for (std::size_t k = 0; k < base.size(); ++k) {
      CHECK(after[k] == doctest::Approx(base[k]).epsilon(1e-12));
    }
  }

  SUBCASE("errors") {
    AnchorBank empty;
    std::vector<Tensor> feats{Tensor::from_vector({1.0, 0.0})};
    CHECK_THROWS_AS(zero_shot_logits(feats, empty), InvalidInput);
    CHECK_THROWS_AS(zero_shot_logits({}, bank), InvalidInput);
  }
}

TEST_CASE("global aggregator") {
  std::size_t dim = 4, views = 3;

  SUBCASE("hand-built identity blocks average the views") {
    ParamStore store;
    Tensor f1({views * dim, dim}), b1({dim}), f2({dim, dim}), b2({dim});
    for (std::size_t v = 0; v < views; ++v) {
      for (std::size_t j = 0; j < dim; ++j) {
        f1.at(v * dim + j, j) = 1.0 / static_cast<double>(views);
      }
    }
    for (std::size_t j = 0; j < dim; ++j) f2.at(j, j) = 1.0;
    store.add("agg.f1.w", f1);
    store.add("agg.f1.b", b1);
    store.add("agg.f2.w", f2);
    store.add("agg.f2.b", b2);

    Rng rng(5);
    Tape tape;
    std::vector<Var> feats;
    Tensor mean({dim});
    for (std::size_t v = 0; v < views; ++v) {
      Tensor f({dim});
      for (std::size_t j = 0; j < dim; ++j) {
        f[j] = rng.uniform(0.0, 1.0);  // non-negative so ReLU is a no-op
        mean[j] += f[j] / static_cast<double>(views);
      }
      feats.push_back(tape.constant(f));
    }
    const Tensor& g =
        tape.value(global_aggregate(tape, feats, store, "agg.", false));
    for (std::size_t j = 0; j < dim; ++j) {
      CHECK(g[j] == doctest::Approx(mean[j]).epsilon(1e-12));
    }
  }

  SUBCASE("zero input reduces to the bias path; view order matters") {
    ParamStore store;
    Rng rng(6);
    init_aggregator_params(store, "agg.", static_cast<int>(views),
                           static_cast<int>(dim), rng);
    Tape tape;
    std::vector<Var> zeros(views, tape.constant(Tensor({dim})));
    const Tensor& g =
        tape.value(global_aggregate(tape, zeros, store, "agg.", false));
    // Direct bias path: f2(relu(b1)) + b2.
    Tensor b1 = store.tensor("agg.f1.b");
    Tensor w2 = store.tensor("agg.f2.w");
    Tensor b2 = store.tensor("agg.f2.b");
    for (std::size_t j = 0; j < dim; ++j) {
      double acc = b2[j];
      for (std::size_t h = 0; h < dim; ++h) {
        acc += std::max(0.0, b1[h]) * w2.at(h, j);
      }
      CHECK(g[j] == doctest::Approx(acc).epsilon(1e-12));
    }

    std::vector<Var> feats, permuted;
    std::vector<Tensor> raw;
    for (std::size_t v = 0; v < views; ++v) {
      raw.push_back(Tensor::from_vector(random_unit(dim, rng)));
    }
    for (const Tensor& t : raw) feats.push_back(tape.constant(t));
    permuted.push_back(feats[2]);
    permuted.push_back(feats[0]);
    permuted.push_back(feats[1]);
    const Tensor& ga =
        tape.value(global_aggregate(tape, feats, store, "agg.", false));
    const Tensor& gb =
        tape.value(global_aggregate(tape, permuted, store, "agg.", false));
    double diff = 0.0;
    for (std::size_t j = 0; j < dim; ++j) diff += std::abs(ga[j] - gb[j]);
    CHECK(diff > 1e-6);
  }

  SUBCASE("view-count mismatch is a shape error") {
    ParamStore store;
    Rng rng(7);
    init_aggregator_params(store, "agg.", 3, static_cast<int>(dim), rng);
    Tape tape;
    std::vector<Var> two{tape.constant(Tensor({dim})), tape.constant(Tensor({dim}))};
    CHECK_THROWS_AS(
        tape.value(global_aggregate(tape, two, store, "agg.", false)),
        ShapeError);
  }
}

TEST_CASE("gated dual path") {
  std::size_t dim = 6, views = 4, classes = 5;
  Rng rng(11);
  AnchorBank anchors = random_anchors(classes, dim, rng);

  std::vector<Tensor> depth_raw, proxy_raw;
  for (std::size_t v = 0; v < views; ++v) {
    depth_raw.push_back(Tensor::from_vector(random_unit(dim, rng)));
    proxy_raw.push_back(Tensor::from_vector(random_unit(dim, rng)));
  }

  SUBCASE("gate zero collapses bit-exactly to the single path") {
    ParamStore dual;
    Rng ra(21);
    init_dual_path_params(dual, "head.", static_cast<int>(views),
                          static_cast<int>(dim), ra);
    dual.entry("head.gate").values[0] = 0.0;
    ParamStore single;
    Rng rb(21);  // same stream: depth aggregator params are drawn first
    init_single_path_params(single, "head.", static_cast<int>(views),
                            static_cast<int>(dim), rb);

    Tape t1, t2;
    std::vector<Var> d1, p1, d2;
    for (std::size_t v = 0; v < views; ++v) {
      d1.push_back(t1.constant(depth_raw[v]));
      p1.push_back(t1.constant(proxy_raw[v]));
      d2.push_back(t2.constant(depth_raw[v]));
    }
    const Tensor& dual_logits = t1.value(gated_dual_path_logits(
        t1, d1, p1, dual, "head.", false, anchors));
    const Tensor& single_logits = t2.value(
        single_path_logits(t2, d2, single, "head.", false, anchors));
    for (std::size_t k = 0; k < classes; ++k) {
      CHECK(dual_logits[k] == single_logits[k]);
    }
  }

  SUBCASE("gate one with a zero depth path reads the proxy path alone") {
    ParamStore head;
    Rng ra(22);
    init_dual_path_params(head, "head.", static_cast<int>(views),
                          static_cast<int>(dim), ra);
    head.entry("head.gate").values[0] = 1.0;
    for (const char* name : {"head.depth.f1.w", "head.depth.f1.b",
                             "head.depth.f2.w", "head.depth.f2.b"}) {
      auto& vals = head.entry(name).values;
      std::fill(vals.begin(), vals.end(), 0.0);
    }
    Tape tape;
    std::vector<Var> d, p;
    for (std::size_t v = 0; v < views; ++v) {
      d.push_back(tape.constant(depth_raw[v]));
      p.push_back(tape.constant(proxy_raw[v]));
    }
    const Tensor& logits = tape.value(gated_dual_path_logits(
        tape, d, p, head, "head.", false, anchors));
    Var g_proxy = global_aggregate(tape, p, head, "head.proxy.", false);
    for (std::size_t k = 0; k < classes; ++k) {
      Var expect = cosine(g_proxy, tape.constant(anchors.anchors[k]));
      CHECK(logits[k] ==
            doctest::Approx(tape.value(expect).scalar_value()).epsilon(1e-12));
    }
  }

  SUBCASE("cross entropy through the head passes grad_check") {
    ParamStore head;
    Rng ra(23);
    init_dual_path_params(head, "head.", static_cast<int>(views),
                          static_cast<int>(dim), ra);
    double err = grad_check(
        [&](Tape& tape, ParamStore&) {
          std::vector<Var> d, p;
          for (std::size_t v = 0; v < views; ++v) {
            d.push_back(tape.constant(depth_raw[v]));
            p.push_back(tape.constant(proxy_raw[v]));
          }
          Var logits = gated_dual_path_logits(tape, d, p, head, "head.", true,
                                              anchors);
          return cross_entropy(logits, 2);
        },
        head);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("inter-view baseline") {
  std::size_t dim = 5, views = 3, classes = 4;
  Rng rng(31);
  AnchorBank anchors = random_anchors(classes, dim, rng);
  std::vector<Tensor> feats_raw;
  for (std::size_t v = 0; v < views; ++v) {
    feats_raw.push_back(Tensor::from_vector(random_unit(dim, rng)));
  }
  std::vector<double> alpha = uniform_alpha(views);

  SUBCASE("zero view transforms reduce to alpha-weighted cosine logits") {
    ParamStore head;
    Rng ra(41);
    init_inter_view_params(head, "head.", static_cast<int>(views),
                           static_cast<int>(dim), ra);
    for (std::size_t v = 0; v < views; ++v) {
      char idx[16];
      std::snprintf(idx, sizeof idx, "%02zu", v);
      auto& vals = head.entry("head.view" + std::string(idx) + ".w").values;
      std::fill(vals.begin(), vals.end(), 0.0);
    }
    Tape tape;
    std::vector<Var> feats;
    for (const Tensor& t : feats_raw) feats.push_back(tape.constant(t));
    const Tensor& logits = tape.value(
        inter_view_logits(tape, feats, head, "head.", false, anchors, alpha));
    for (std::size_t k = 0; k < classes; ++k) {
      double expect = 0.0;
      for (std::size_t v = 0; v < views; ++v) {
        expect += alpha[v] * plain_cos(feats_raw[v].values(),
                                       anchors.anchors[k].values());
      }
      CHECK(logits[k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  SUBCASE("identical views and shared transforms collapse per-view terms") {
    ParamStore head;
    Rng ra(42);
    init_inter_view_params(head, "head.", static_cast<int>(views),
                           static_cast<int>(dim), ra);
    // share one transform across views so every adapted feature is equal
    const auto& w0 = head.entry("head.view00.w").values;
    head.entry("head.view01.w").values = w0;
    head.entry("head.view02.w").values = w0;

    Tape tape;
    std::vector<Var> same(views, tape.constant(feats_raw[0]));
    const Tensor& logits = tape.value(
        inter_view_logits(tape, same, head, "head.", false, anchors, alpha));

    Var g = global_aggregate(tape, same, head, "head.agg.", false);
    Var adapted = add(same[0],
                      relu(matmul_transposed(g, tape.constant(head.tensor(
                               "head.view00.w")))));
    for (std::size_t k = 0; k < classes; ++k) {
      Var expect = cosine(adapted, tape.constant(anchors.anchors[k]));
      CHECK(logits[k] ==
            doctest::Approx(tape.value(expect).scalar_value()).epsilon(1e-12));
    }
  }

  SUBCASE("random instance matches a direct evaluation") {
    ParamStore head;
    Rng ra(43);
    init_inter_view_params(head, "head.", static_cast<int>(views),
                           static_cast<int>(dim), ra);
    Tape tape;
    std::vector<Var> feats;
    for (const Tensor& t : feats_raw) feats.push_back(tape.constant(t));
    std::vector<double> weights{0.5, 0.3, 0.2};
    const Tensor& logits = tape.value(
        inter_view_logits(tape, feats, head, "head.", false, anchors, weights));

    // Independent evaluation with raw loops.
    Tensor w1 = head.tensor("head.agg.f1.w");
    Tensor b1 = head.tensor("head.agg.f1.b");
    Tensor w2 = head.tensor("head.agg.f2.w");
    Tensor b2 = head.tensor("head.agg.f2.b");
    std::vector<double> cat;
    for (const Tensor& t : feats_raw) {
      cat.insert(cat.end(), t.values().begin(), t.values().end());
    }
    std::vector<double> h(dim, 0.0), g(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
      double acc = b1[j];
      for (std::size_t i = 0; i < cat.size(); ++i) acc += cat[i] * w1.at(i, j);
      h[j] = std::max(0.0, acc);
    }
    for (std::size_t j = 0; j < dim; ++j) {
      double acc = b2[j];
      for (std::size_t i = 0; i < dim; ++i) acc += h[i] * w2.at(i, j);
      g[j] = acc;
    }
    for (std::size_t k = 0; k < classes; ++k) {
      double expect = 0.0;
      for (std::size_t v = 0; v < views; ++v) {
        char idx[16];
        std::snprintf(idx, sizeof idx, "%02zu", v);
        Tensor wv = head.tensor("head.view" + std::string(idx) + ".w");
        std::vector<double> adapted(dim);
        for (std::size_t j = 0; j < dim; ++j) {
          double acc = 0.0;
          for (std::size_t p = 0; p < dim; ++p) acc += g[p] * wv.at(j, p);
          adapted[j] = feats_raw[v][j] + std::max(0.0, acc);
        }
        expect += weights[v] * plain_cos(adapted, anchors.anchors[k].values());
      }
      CHECK(logits[k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  SUBCASE("cross entropy through the baseline passes grad_check") {
    ParamStore head;
    Rng ra(47);
    init_inter_view_params(head, "head.", static_cast<int>(views),
                           static_cast<int>(dim), ra);
    double err = grad_check(
        [&](Tape& tape, ParamStore&) {
          std::vector<Var> feats;
          for (const Tensor& t : feats_raw) feats.push_back(tape.constant(t));
          Var logits = inter_view_logits(tape, feats, head, "head.", true,
                                         anchors, alpha);
          return cross_entropy(logits, 1);
        },
        head);
    CHECK(err < 1e-4);
  }
}
