#include <doctest.h>

#include <random>

#include "regnn/relemb.hpp"
#include "support.hpp"

using namespace regnn;
using namespace regnn::testing;

namespace {

// 6-node, 2-relation fixture used by the gradient gates.
HeteroGraph small_graph() {
  return make_graph({{"a", 2}, {"b", 4}},
                    {{"ab", "a", "b", {{0, 0}, {1, 1}, {0, 2}, {1, 3}}},
                     {"ba", "b", "a", {{0, 0}, {2, 0}, {3, 1}}}});
}

}  // namespace

TEST_CASE("init_embeddings scales to unit weights") {
  for (double lambda : {100.0, 1.0, 0.001}) {
    RelationEmbeddings emb = init_embeddings(lambda, 3, 2, 2);
    CHECK(emb.e[0](0, 0) == doctest::Approx(1.0 / lambda).epsilon(1e-15));
    CHECK(emb.alpha(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(emb.beta(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(emb.e[0].cols() + emb.s[0].cols() == 5);  // |R| + |F| per layer
  }
  CHECK_THROWS_AS(init_embeddings(0.0, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(init_embeddings(-2.0, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("tau is leaky relu with slope 0.01") {
  CHECK(tau(1.0) == 1.0);
  CHECK(tau(0.0) == 0.0);
  CHECK(tau(-0.5) == doctest::Approx(-0.005).epsilon(1e-15));
}

TEST_CASE("assemble_adjacency at initialization is the homogenized graph") {
  HeteroGraph g = small_graph();
  RelationEmbeddings emb = init_embeddings(100.0, 2, 2, 1);
  WeightedAdjacency wa = assemble_adjacency(g, emb, 0, true);
  DenseMatrix expect = dense_weighted_adjacency(g, {1.0, 1.0}, {1.0, 1.0});
  CHECK(max_abs_diff(wa.hat.to_dense(), expect) < 1e-15);
}

TEST_CASE("assemble_adjacency hand case") {
  // types a:{0}, b:{1,2}; one relation with edges from b-locals 0,1 into a
  HeteroGraph g = make_graph({{"a", 1}, {"b", 2}}, {{"r", "b", "a", {{0, 0}, {1, 0}}}});
  RelationEmbeddings emb;
  emb.lambda = 1.0;
  emb.e = {DenseMatrix(1, 1, {2.0})};
  emb.s = {DenseMatrix(1, 2, {0.5, 1.0})};
  WeightedAdjacency wa = assemble_adjacency(build_pattern(g), emb, 0, SelfLoopMode::Embedded);
  DenseMatrix d = wa.hat.to_dense();
  CHECK(d(0, 0) == 0.5);
  CHECK(d(0, 1) == 2.0);
  CHECK(d(0, 2) == 2.0);
  CHECK(d(1, 0) == 0.0);
  CHECK(d(1, 1) == 1.0);
  CHECK(d(2, 2) == 1.0);
  CHECK(d(2, 1) == 0.0);

  WeightedAdjacency norm = normalize_adjacency(wa, NormMode::Row);
  DenseMatrix t = norm.tilde.to_dense();
  CHECK(t(0, 0) == doctest::Approx(1.0 / 9).epsilon(1e-12));
  CHECK(t(0, 1) == doctest::Approx(4.0 / 9).epsilon(1e-12));
  CHECK(t(0, 2) == doctest::Approx(4.0 / 9).epsilon(1e-12));
}

TEST_CASE("relations sharing an edge sum their weights") {
  HeteroGraph g = make_graph({{"x", 2}},
                             {{"r0", "x", "x", {{1, 0}}}, {"r1", "x", "x", {{1, 0}}}});
  RelationEmbeddings emb;
  emb.lambda = 1.0;
  emb.e = {DenseMatrix(1, 2, {2.0, 3.0})};
  emb.s = {DenseMatrix(1, 1, {0.0})};
  WeightedAdjacency wa = assemble_adjacency(build_pattern(g), emb, 0, SelfLoopMode::Embedded);
  CHECK(wa.hat.to_dense()(0, 1) == 5.0);
  // dense construction oracle
  DenseMatrix expect = dense_weighted_adjacency(g, {2.0, 3.0}, {0.0});
  CHECK(max_abs_diff(wa.hat.to_dense(), expect) == 0.0);
}

TEST_CASE("normalization modes") {
  {
    // identity stays identity under both modes
    HeteroGraph g = make_graph({{"x", 3}}, {});
    RelationEmbeddings emb = init_embeddings(1.0, 0, 1, 1);
    WeightedAdjacency wa = assemble_adjacency(build_pattern(g), emb, 0, SelfLoopMode::Embedded);
    CHECK(max_abs_diff(normalize_adjacency(wa, NormMode::Row).tilde.to_dense(),
                       DenseMatrix::identity(3)) == 0.0);
    CHECK(max_abs_diff(normalize_adjacency(wa, NormMode::Symmetric).tilde.to_dense(),
                       DenseMatrix::identity(3)) == 0.0);
  }
  {
    // random non-negative weights: every nonzero row sums to 1
    std::mt19937_64 rng(5);
    HeteroGraph g = make_graph({{"x", 5}}, {{"r", "x", "x",
                                             {{0, 1}, {1, 2}, {3, 2}, {4, 0}, {2, 4}, {1, 3}}}});
    RelationEmbeddings emb;
    emb.lambda = 1.0;
    emb.e = {DenseMatrix::uniform(1, 1, 0.2, 2.0, rng)};
    emb.s = {DenseMatrix::uniform(1, 1, 0.2, 2.0, rng)};
    WeightedAdjacency wa = normalize_adjacency(
        assemble_adjacency(build_pattern(g), emb, 0, SelfLoopMode::Embedded), NormMode::Row);
    for (double s : wa.tilde.row_sums()) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    // symmetric mode rejects negative entries, naming the offender
    HeteroGraph g = make_graph({{"x", 2}}, {{"r", "x", "x", {{1, 0}}}});
    RelationEmbeddings emb;
    emb.lambda = 1.0;
    emb.e = {DenseMatrix(1, 1, {-5.0})};  // tau(-5) < 0
    emb.s = {DenseMatrix(1, 1, {1.0})};
    WeightedAdjacency wa = assemble_adjacency(build_pattern(g), emb, 0, SelfLoopMode::Embedded);
    CHECK_THROWS_AS(normalize_adjacency(wa, NormMode::Symmetric), std::domain_error);
  }
}

TEST_CASE("aggregate at init equals plain normalized aggregation") {
  std::mt19937_64 rng(9);
  HeteroGraph g = small_graph();
  RelationEmbeddings emb = init_embeddings(100.0, 2, 2, 1);
  PatternPtr pat = build_pattern(g);
  DenseMatrix h0 = DenseMatrix::gaussian(6, 3, 0.0, 1.0, rng);

  Tape tape;
  AggregateOptions opt;
  opt.lambda = emb.lambda;
  Var e = tape.constant(emb.e[0]);
  Var s = tape.constant(emb.s[0]);
  Var out = aggregate_with_gradients(tape, pat, opt, e, s, tape.constant(h0));

  DenseMatrix expect = matmul(
      dense_row_normalize(dense_weighted_adjacency(g, {1.0, 1.0}, {1.0, 1.0})), h0);
  CHECK(max_abs_diff(tape.value(out), expect) < 1e-12);
}

TEST_CASE("embedding gradients match finite differences through the normalization") {
  std::mt19937_64 rng(13);
  HeteroGraph g = small_graph();
  PatternPtr pat = build_pattern(g);
  DenseMatrix h0 = DenseMatrix::gaussian(6, 3, 0.0, 1.0, rng);
  DenseMatrix e0 = DenseMatrix::uniform(1, 2, 0.005, 0.02, rng);
  DenseMatrix s0 = DenseMatrix::uniform(1, 2, 0.005, 0.02, rng);

  for (NormMode norm : {NormMode::Row, NormMode::None, NormMode::Symmetric}) {
    AggregateOptions opt;
    opt.lambda = 100.0;
    opt.norm = norm;

    Tape tape;
    Var e = tape.param(e0);
    Var s = tape.param(s0);
    Var h = tape.param(h0);
    Var out = aggregate_with_gradients(tape, pat, opt, e, s, h);
    Var loss = tape.sum_squares(out);
    tape.backward(loss);

    DenseMatrix pe = e0, ps = s0, ph = h0;
    DenseMatrix ge = tape.grad(e), gs = tape.grad(s), gh = tape.grad(h);
    auto f = [&]() {
      Tape t;
      Var ee = t.constant(pe);
      Var ss = t.constant(ps);
      Var hh = t.constant(ph);
      return t.value(t.sum_squares(aggregate_with_gradients(t, pat, opt, ee, ss, hh)))(0, 0);
    };
    double err = finite_diff_check(f, {&pe, &ps, &ph}, {&ge, &gs, &gh}, 1e-6);
    CAPTURE(static_cast<int>(norm));
    CHECK(err < 1e-4);
    // cross-check at a second step size
    CHECK(finite_diff_check(f, {&pe, &ps, &ph}, {&ge, &gs, &gh}, 1e-7) < 1e-4);
  }
}

TEST_CASE("gradient to e is lambda times gradient to alpha") {
  std::mt19937_64 rng(17);
  HeteroGraph g = small_graph();
  PatternPtr pat = build_pattern(g);
  DenseMatrix h0 = DenseMatrix::gaussian(6, 2, 0.0, 1.0, rng);
  DenseMatrix alpha = DenseMatrix::uniform(1, 2, 0.5, 1.5, rng);
  DenseMatrix beta = DenseMatrix::uniform(1, 2, 0.5, 1.5, rng);

  auto run = [&](double lambda) {
    Tape tape;
    AggregateOptions opt;
    opt.lambda = lambda;
    DenseMatrix e0 = alpha, s0 = beta;
    e0.scale_inplace(1.0 / lambda);  // same alpha regardless of lambda
    s0.scale_inplace(1.0 / lambda);
    Var e = tape.param(e0);
    Var s = tape.param(s0);
    Var out = aggregate_with_gradients(tape, pat, opt, e, s, tape.constant(h0));
    tape.backward(tape.sum_squares(out));
    return std::make_pair(tape.grad(e), tape.grad(s));
  };
  auto [ge100, gs100] = run(100.0);
  auto [ge1, gs1] = run(1.0);
  for (std::size_t r = 0; r < 2; ++r)
    CHECK(ge100(0, r) == doctest::Approx(100.0 * ge1(0, r)).epsilon(1e-12));
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(gs100(0, j) == doctest::Approx(100.0 * gs1(0, j)).epsilon(1e-12));
}

TEST_CASE("relation permutation equivariance") {
  HeteroGraph g = small_graph();
  RelationEmbeddings emb;
  emb.lambda = 1.0;
  emb.e = {DenseMatrix(1, 2, {0.7, 1.9})};
  emb.s = {DenseMatrix(1, 2, {0.4, 1.1})};
  DenseMatrix a = assemble_adjacency(build_pattern(g), emb, 0, SelfLoopMode::Embedded).hat.to_dense();

  HeteroGraph swapped = g;
  std::swap(swapped.relations[0], swapped.relations[1]);
  RelationEmbeddings emb2 = emb;
  std::swap(emb2.e[0](0, 0), emb2.e[0](0, 1));
  DenseMatrix b =
      assemble_adjacency(build_pattern(swapped), emb2, 0, SelfLoopMode::Embedded).hat.to_dense();
  CHECK(max_abs_diff(a, b) == 0.0);
}

TEST_CASE("self-loop modes") {
  HeteroGraph g = make_graph({{"x", 2}}, {{"r", "x", "x", {{1, 0}}}});
  RelationEmbeddings emb;
  emb.lambda = 1.0;
  emb.e = {DenseMatrix(1, 1, {2.0})};
  emb.s = {DenseMatrix(1, 1, {3.0})};
  PatternPtr pat = build_pattern(g);
  CHECK(assemble_adjacency(pat, emb, 0, SelfLoopMode::Embedded).hat.to_dense()(0, 0) == 3.0);
  CHECK(assemble_adjacency(pat, emb, 0, SelfLoopMode::Identity).hat.to_dense()(0, 0) == 1.0);
  CHECK(assemble_adjacency(pat, emb, 0, SelfLoopMode::None).hat.to_dense()(0, 0) == 0.0);
}
