#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "erg/optim.hpp"
#include "erg/rng.hpp"
#include "erg/tensor.hpp"
#include "testing_util.hpp"

using erg::Rng;
using erg::ad::AdamW;
using erg::ad::AdamWConfig;
using erg::ad::LinearSchedule;
using erg::ad::Tape;
using erg::ad::Tensor;
using erg::testing::check_gradients;
using erg::testing::random_tensor;

TEST_CASE("row_softmax of equal logits is uniform") {
  Tape tape;
  auto x = erg::ad::row_vector({0.0, 0.0});
  auto y = tape.row_softmax(x);
  CHECK(y->at(0, 0) == doctest::Approx(0.5));
  CHECK(y->at(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("row_softmax rows sum to 1 and stay strictly positive") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Tape tape;
    auto x = random_tensor(3, 5, rng, -30.0, 30.0, false);
    auto y = tape.row_softmax(x);
    for (std::size_t i = 0; i < y->rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < y->cols; ++j) {
        CHECK(y->at(i, j) > 0.0);
        s += y->at(i, j);
      }
      CHECK(std::fabs(s - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("leaky_relu applies the slope on the negative side") {
  Tape tape;
  auto x = erg::ad::row_vector({-1.0, 2.0});
  auto y = tape.leaky_relu(x, 0.2);
  CHECK(y->at(0, 0) == doctest::Approx(-0.2));
  CHECK(y->at(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("cross_entropy_rows matches the analytic value") {
  Tape tape;
  auto target = erg::ad::row_vector({1.0, 0.0});
  auto predicted = erg::ad::row_vector({0.5, 0.5});
  auto loss = tape.cross_entropy_rows(target, predicted);
  CHECK(loss->scalar_value() == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("shape mismatches are rejected with both shapes named") {
  Tape tape;
  auto a = erg::ad::tensor(2, 3);
  auto b = erg::ad::tensor(4, 5);
  CHECK_THROWS_WITH_AS(tape.matmul(a, b), doctest::Contains("2x3"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(tape.add(a, b), doctest::Contains("4x5"),
                       std::invalid_argument);
  CHECK_THROWS_AS(tape.elementwise_mul(a, b), std::invalid_argument);
  CHECK_THROWS_AS(tape.cross_entropy_rows(a, b), std::invalid_argument);
}

TEST_CASE("backward on sum(x*x) gives 2x") {
  Tape tape;
  auto x = erg::ad::row_vector({1.0, 2.0}, true);
  auto loss = tape.sum(tape.elementwise_mul(x, x));
  tape.backward(loss);
  CHECK(x->grad[0] == doctest::Approx(2.0));
  CHECK(x->grad[1] == doctest::Approx(4.0));
  CHECK(tape.size() == 0);
}

TEST_CASE("backward rejects a non-scalar loss") {
  Tape tape;
  auto x = erg::ad::row_vector({1.0, 2.0}, true);
  auto y = tape.elementwise_mul(x, x);
  CHECK_THROWS_AS(tape.backward(y), std::invalid_argument);
}

TEST_CASE("backward on an empty tape is rejected") {
  Tape tape;
  auto loss = erg::ad::scalar(1.0);
  CHECK_THROWS_AS(tape.backward(loss), std::invalid_argument);
}

TEST_CASE("constant loss leaves parameter gradients at zero") {
  Tape tape;
  auto param = erg::ad::row_vector({3.0, -1.0}, true);
  auto c = erg::ad::row_vector({1.0, 2.0});
  auto loss = tape.sum(tape.elementwise_mul(c, c));
  tape.backward(loss);
  CHECK(param->grad[0] == 0.0);
  CHECK(param->grad[1] == 0.0);
}

TEST_CASE("gradients accumulate across repeated uses of a parameter") {
  Tape tape;
  auto x = erg::ad::scalar(3.0, true);
  // loss = x + x -> dloss/dx = 2
  auto loss = tape.add(x, x);
  tape.backward(loss);
  CHECK(x->grad[0] == doctest::Approx(2.0));
}

TEST_CASE("finite differences confirm every primitive's backward rule") {
  Rng rng(29);

  SUBCASE("matmul") {
    auto a = random_tensor(2, 3, rng);
    auto b = random_tensor(3, 4, rng);
    auto w = random_tensor(2, 4, rng, -1.0, 1.0, false);
    auto r = check_gradients(
        [&](Tape& t) { return t.sum(t.elementwise_mul(t.matmul(a, b), w)); }, {a, b});
    CHECK(r.max_rel_err < 1e-4);
  }
  SUBCASE("add same shape and row broadcast") {
    auto a = random_tensor(3, 4, rng);
    auto b = random_tensor(3, 4, rng);
    auto bias = random_tensor(1, 4, rng);
    auto w = random_tensor(3, 4, rng, -1.0, 1.0, false);
    auto r = check_gradients(
        [&](Tape& t) {
          return t.sum(t.elementwise_mul(t.add(t.add(a, b), bias), w));
        },
        {a, b, bias});
    CHECK(r.max_rel_err < 1e-4);
  }
  SUBCASE("concat_rows and concat_cols") {
    auto a = random_tensor(2, 3, rng);
    auto b = random_tensor(1, 3, rng);
    auto c = random_tensor(3, 2, rng);
    auto w1 = random_tensor(3, 3, rng, -1.0, 1.0, false);
    auto w2 = random_tensor(3, 5, rng, -1.0, 1.0, false);
    auto r = check_gradients(
        [&](Tape& t) {
          auto stacked = t.concat_rows({a, b});
          auto wide = t.concat_cols({stacked, c});
          return t.add(t.sum(t.elementwise_mul(stacked, w1)),
                       t.sum(t.elementwise_mul(wide, w2)));
        },
        {a, b, c});
    CHECK(r.max_rel_err < 1e-4);
  }
  SUBCASE("row_softmax") {
    auto x = random_tensor(2, 4, rng);
    auto w = random_tensor(2, 4, rng, -1.0, 1.0, false);
    auto r = check_gradients(
        [&](Tape& t) { return t.sum(t.elementwise_mul(t.row_softmax(x), w)); }, {x});
    CHECK(r.max_rel_err < 1e-4);
  }
  SUBCASE("leaky_relu tanh sigmoid") {
    auto x = random_tensor(2, 3, rng);
    auto w = random_tensor(2, 3, rng, -1.0, 1.0, false);
    auto r = check_gradients(
        [&](Tape& t) {
          auto y = t.leaky_relu(x, 0.2);
          auto z = t.tanh(y);
          auto s = t.sigmoid(z);
          return t.sum(t.elementwise_mul(s, w));
        },
        {x});
    CHECK(r.max_rel_err < 1e-4);
  }
  SUBCASE("scalar_mul sum mean") {
    auto x = random_tensor(3, 3, rng);
    auto r = check_gradients(
        [&](Tape& t) { return t.add(t.mean(x), t.scalar_mul(t.sum(x), 0.3)); }, {x});
    CHECK(r.max_rel_err < 1e-4);
  }
  SUBCASE("cross_entropy_rows including the target side") {
    auto logits = random_tensor(3, 4, rng);
    auto targets = random_tensor(3, 4, rng, 0.1, 1.0);
    auto r = check_gradients(
        [&](Tape& t) {
          return t.cross_entropy_rows(targets, t.row_softmax(logits));
        },
        {logits, targets});
    CHECK(r.max_rel_err < 1e-4);
  }
  SUBCASE("select_row select_col dot affine") {
    auto m = random_tensor(3, 4, rng);
    auto w = random_tensor(4, 2, rng);
    auto b = random_tensor(1, 2, rng);
    auto r = check_gradients(
        [&](Tape& t) {
          auto row = t.select_row(m, 1);
          auto out = t.affine(row, w, b);
          auto col = t.select_col(m, 2);
          return t.add(t.dot(out, out), t.sum(col));
        },
        {m, w, b});
    CHECK(r.max_rel_err < 1e-4);
  }
}

TEST_CASE("random three-layer composition matches finite differences") {
  Rng rng(101);
  auto x = random_tensor(2, 5, rng);
  auto w1 = random_tensor(5, 4, rng);
  auto b1 = random_tensor(1, 4, rng);
  auto w2 = random_tensor(4, 3, rng);
  auto b2 = random_tensor(1, 3, rng);
  auto w3 = random_tensor(3, 2, rng);
  auto b3 = random_tensor(1, 2, rng);
  auto target = erg::ad::tensor(2, 2, {1.0, 0.0, 0.0, 1.0});

  auto r = check_gradients(
      [&](Tape& t) {
        auto h1 = t.tanh(t.affine(x, w1, b1));
        auto h2 = t.leaky_relu(t.affine(h1, w2, b2), 0.2);
        auto probs = t.row_softmax(t.affine(h2, w3, b3));
        return t.cross_entropy_rows(target, probs);
      },
      {x, w1, b1, w2, b2, w3, b3});
  CHECK(r.max_rel_err < 1e-4);
  CHECK(r.entries_checked == 10 + 20 + 4 + 12 + 3 + 6 + 2);
}

TEST_CASE("forward results stay finite on finite inputs") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    Tape tape;
    auto x = random_tensor(2, 3, rng, -50.0, 50.0, false);
    auto y = tape.row_softmax(tape.tanh(tape.scalar_mul(x, 3.0)));
    auto ce = tape.cross_entropy_rows(y, y);
    CHECK(std::isfinite(ce->scalar_value()));
    for (double v : y->values) {
      CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("adamw: zero gradient and zero decay leave the parameter unchanged") {
  auto p = erg::ad::scalar(1.5, true);
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  AdamW opt({p}, cfg);
  opt.step(0.1);
  CHECK(p->scalar_value() == doctest::Approx(1.5));
}

TEST_CASE("adamw: single step on a scalar matches the hand evaluation") {
  auto p = erg::ad::scalar(1.0, true);
  p->grad[0] = 1.0;
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  AdamW opt({p}, cfg);
  opt.step(0.1);
  // m_hat = 1, v_hat = 1 -> p = 1 - 0.1 * 1/(1 + 1e-8)
  CHECK(p->scalar_value() == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(p->grad[0] == 0.0);
  CHECK(opt.steps_taken() == 1);
}

TEST_CASE("adamw: decay-only step scales the parameter by 1 - rate*wd") {
  auto p = erg::ad::scalar(2.0, true);
  AdamWConfig cfg;
  cfg.weight_decay = 1e-2;
  AdamW opt({p}, cfg);
  opt.step(0.1);
  CHECK(p->scalar_value() == doctest::Approx(2.0 * (1.0 - 0.001)).epsilon(1e-12));
}

TEST_CASE("linear schedule endpoints and monotonicity") {
  LinearSchedule sched{0.02, 100};
  CHECK(sched.rate(0) == doctest::Approx(0.02));
  CHECK(sched.rate(100) == doctest::Approx(0.0));
  CHECK(sched.rate(200) == doctest::Approx(0.0));
  double prev = sched.rate(0);
  for (int t = 1; t <= 120; ++t) {
    const double r = sched.rate(t);
    CHECK(r <= prev + 1e-15);
    prev = r;
  }
}

TEST_CASE("identical seeds give bitwise identical training trajectories") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    auto w = random_tensor(3, 3, rng);
    auto x = random_tensor(2, 3, rng, -1.0, 1.0, false);
    AdamW opt({w}, AdamWConfig{});
    LinearSchedule sched{1e-2, 50};
    for (int step = 0; step < 20; ++step) {
      Tape tape;
      auto y = tape.tanh(tape.matmul(x, w));
      auto loss = tape.sum(tape.elementwise_mul(y, y));
      tape.backward(loss);
      opt.step(sched.rate(step));
    }
    return w->values;
  };
  const auto a = run(99);
  const auto b = run(99);
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}
