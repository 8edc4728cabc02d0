#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "nfba/error.hpp"
#include "nfba/games.hpp"

using namespace nfba;

namespace {

constexpr int kPrec = 160;

std::shared_ptr<const NumberField> field_named(const std::string& name) {
  return std::make_shared<NumberField>(NumberField::preset(name));
}

SNumber on_line(const Real& v) { return SNumber(PlaceLayout{{PlaceKind::Real}}, {Complex(v)}, v.precision()); }
SNumber on_line(double v) { return on_line(Real(v, kPrec)); }

Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

GameConfig rational_game(double beta, int rounds, std::uint64_t seed) {
  GameConfig c;
  c.beta = beta;
  c.field = field_named("Q");
  c.playground = std::make_shared<MinkowskiSpace>(c.field->layout());
  c.family = {FamilyKind::HK, 1};
  c.max_rounds = rounds;
  c.seed = seed;
  c.certifiers.push_back({beta});
  return c;
}

GameConfig interval_game(double beta, int rounds, std::uint64_t seed) {
  GameConfig c;
  c.beta = beta;
  c.playground = std::make_shared<UnitInterval>();
  c.family = {FamilyKind::Singletons, 1};
  c.max_rounds = rounds;
  c.seed = seed;
  return c;
}

/* Deletes the singleton at a fixed point every round. */
AliceStrategy delete_point(double p) {
  return {"point", true, [p](const GameConfig& c, const FormalBall& bob, int) {
            return AliceChoice{{{on_line(Real(p, c.precision)), {0}, std::nullopt}}, Real(c.beta, c.precision) * bob.radius};
          }};
}

void check_nesting_and_h4(const Transcript& t) {
  const auto& m = t.moves;
  for (size_t i = 2; i < m.size(); i += 2) {
    const auto& prev = *m[i - 2].ball;
    const auto& a = *m[i - 1].choice;
    const auto& next = *m[i].ball;
    CHECK(next.radius <= prev.radius);
    CHECK(next.radius >= prev.radius * t.config.beta * (1 - 1e-30));
    for (const auto& s : a.sets) CHECK(s.distance(next.center) - (a.rho + next.radius) > 0.0);
  }
  // The limit lies in every recorded Bob ball.
  for (const auto& b : bob_balls(t)) CHECK(distance(t.limit.center, b.center) <= b.radius * (1 + 1e-30));
}

}  // namespace

TEST_CASE("rule checks name the broken rule") {
  auto c = interval_game(0.25, 5, 1);
  c.precision = kPrec;
  FormalBall b{on_line(0.5), Real(0.5, kPrec)};
  AliceChoice dummy{{}, Real(0.125, kPrec)};
  CHECK_FALSE(validate_bob(c, b, dummy, b));

  AliceChoice greedy{{}, Real(0.25, kPrec)};
  auto v = validate_alice(c, b, greedy);
  REQUIRE(v);
  CHECK(v->rule == "H2");

  // dist(c', {0.5}) = 0.25 = rho + r' exactly: H4 demands strict inequality.
  AliceChoice del{{{on_line(0.5), {0}, std::nullopt}}, Real(0.125, kPrec)};
  FormalBall edge{on_line(0.75), Real(0.125, kPrec)};
  v = validate_bob(c, b, del, edge);
  REQUIRE(v);
  CHECK(v->rule == "H4");
  FormalBall inside{on_line(0.7578125), Real(0.125, kPrec)};
  CHECK_FALSE(validate_bob(c, b, del, inside));

  FormalBall tiny{on_line(0.9), Real(0.01, kPrec)};
  CHECK(validate_bob(c, b, dummy, tiny)->rule == "H3");
  FormalBall outside{on_line(1.2), Real(0.125, kPrec)};
  CHECK(validate_bob(c, b, dummy, outside)->rule == "H1");
  FormalBall loose{on_line(0.95), Real(0.125, kPrec)};
  CHECK(validate_bob(c, b, dummy, loose)->rule == "H3");

  AliceChoice two{{{on_line(0.1), {0}, std::nullopt}, {on_line(0.2), {0}, std::nullopt}}, Real(0.125, kPrec)};
  CHECK(validate_alice(c, b, two)->rule == "H2");
  c.family.N = 2;
  CHECK_FALSE(validate_alice(c, b, two));
}

TEST_CASE("H_K membership needs qualifying T and a K-rational anchor") {
  auto field = field_named("Q(sqrt2)");
  GameConfig c;
  c.beta = 0.1;
  c.field = field;
  c.playground = std::make_shared<MinkowskiSpace>(field->layout());
  c.precision = kPrec;
  FormalBall b = c.playground->initial_ball(kPrec);
  AlgebraicNumber half = field->from_rational(q(1, 2));
  SNumber e = embed(*field, half, kPrec);
  CHECK_FALSE(validate_alice(c, b, {{{e, {0, 1}, half}}, Real(0.05, kPrec)}));
  CHECK(validate_alice(c, b, {{{e, {0}, half}}, Real(0.05, kPrec)})->rule == "H2");
  CHECK(validate_alice(c, b, {{{e, {0, 1}, std::nullopt}}, Real(0.05, kPrec)})->rule == "H2");
  CHECK(hk_qualifying_subsets(field->layout()).size() == 1);
}

TEST_CASE("alice main strategy constants and moves") {
  auto field = field_named("Q");
  auto c = rational_game(0.1, 1, 1);
  c.precision = kPrec;
  auto sigma = alice_main_strategy(field, 0.1);

  // A ball of radius 0.01 meets no fraction below epsilon at t = -1/2 log(0.001).
  FormalBall far{on_line(0.6180339887), Real(0.01, kPrec)};
  auto a = sigma.move(c, far, 1);
  CHECK(a.dummy());
  CHECK(a.rho.to_double() == doctest::Approx(0.001));

  // Near 1/3, at t = -1/2 log(1e-5), the height of 1/3 drops below epsilon.
  FormalBall near{on_line(1.0 / 3 + 1e-5), Real(1e-4, kPrec)};
  a = sigma.move(c, near, 1);
  REQUIRE(a.sets.size() == 1);
  REQUIRE(a.sets[0].exact);
  CHECK(*a.sets[0].exact == field->from_rational(q(1, 3)));
  CHECK_FALSE(validate_alice(c, near, a));

  // epsilon = 2^-1 (1 + 2/0.1)^-1 = 1/42, and t_n for rho_n = 0.01.
  Real t = log(Real(0.001, kPrec)) * -0.5;
  CHECK(t.to_double() == doctest::Approx(3.45388).epsilon(1e-5));
  CHECK(uniqueness_epsilon(1, t, Real(0.01, kPrec)).to_double() == doctest::Approx(1.0 / 42).epsilon(1e-12));
}

TEST_CASE("main strategy beats random Bob over Q") {
  auto field = field_named("Q");
  auto c = rational_game(0.05, 40, 11);
  auto t = play(c, alice_main_strategy(field, 0.05), bob_random());
  CHECK(t.reason == Termination::MaxRounds);
  CHECK(t.bob_rounds() == 41);
  REQUIRE(t.verdict);
  CHECK(*t.verdict == Verdict::Certified);
  CHECK(t.certificates[0].epsilon.to_double() == doctest::Approx(0.5 / 41).epsilon(1e-12));
  check_nesting_and_h4(t);
}

TEST_CASE("dummy Alice lets Bob reach 1/2") {
  auto c = rational_game(0.1, 30, 3);
  auto t = play(c, alice_dummy(), bob_target_seeking(on_line(0.5)));
  CHECK(std::abs(t.limit.center[0].re.to_double() - 0.5) < 1e-12);
  REQUIRE(t.verdict);
  CHECK(*t.verdict == Verdict::Refuted);
}

TEST_CASE("zero rounds leave only Bob's first ball") {
  auto c = rational_game(0.1, 0, 1);
  auto t = play(c, alice_dummy(), bob_random());
  CHECK(t.moves.size() == 1);
  CHECK(t.moves[0].player == Player::Bob);
}

TEST_CASE("hugger sits on the H4 boundary") {
  auto c = interval_game(0.2, 1, 1);
  auto t = play(c, delete_point(0.5), bob_hugger());
  REQUIRE(t.moves.size() == 3);
  const auto& a = *t.moves[1].choice;
  const auto& next = *t.moves[2].ball;
  Real gap = abs(next.center[0].re - 0.5) - (a.rho + next.radius);
  CHECK(gap > 0.0);
  CHECK(gap.to_double() < 1e-6 * (a.rho + next.radius).to_double());
}

TEST_CASE("target seeking Bob settles next to a deleted target") {
  auto c = interval_game(0.2, 1, 2);
  auto t = play(c, delete_point(0.5), bob_target_seeking(on_line(0.5)));
  REQUIRE(t.moves.size() == 3);
  const auto& a = *t.moves[1].choice;
  const auto& next = *t.moves[2].ball;
  double d = std::abs(next.center[0].re.to_double() - 0.5);
  double bound = (a.rho + next.radius).to_double();
  CHECK(d > bound);
  CHECK(d < bound * (1 + 1e-6));
}

TEST_CASE("random Bob after a dummy deletion") {
  auto c = interval_game(0.3, 1, 5);
  auto t = play(c, alice_dummy(), bob_random());
  REQUIRE(t.moves.size() == 3);
  CHECK(t.moves[2].ball->radius == Real(0.3, t.config.precision) * t.moves[0].ball->radius);
  CHECK(ball_precedes(*t.moves[2].ball, *t.moves[0].ball));
}

TEST_CASE("main strategy against every Bob over Q(i)") {
  auto field = field_named("Q(i)");
  for (double beta : {0.05, 0.1}) {
    GameConfig c;
    c.beta = beta;
    c.field = field;
    c.playground = std::make_shared<MinkowskiSpace>(field->layout());
    c.max_rounds = 30;
    c.certifiers.push_back({beta});
    SNumber half = embed(*field, field->from_rational(q(1, 2)), kPrec);
    for (const auto& bob : {bob_random(), bob_target_seeking(half), bob_hugger()}) {
      c.seed = 7;
      auto t = play(c, alice_main_strategy(field, beta), bob);
      CAPTURE(bob.name);
      CHECK(t.reason == Termination::MaxRounds);
      REQUIRE(t.verdict);
      CHECK(*t.verdict == Verdict::Certified);
      check_nesting_and_h4(t);
    }
  }
}

TEST_CASE("schmidt game radii and forfeits") {
  GameConfig c = interval_game(0.5, 20, 1);
  c.kind = GameKind::Schmidt;
  c.alpha = 0.5;
  auto t = schmidt_play(c, schmidt_alice_concentric(), schmidt_bob_random());
  CHECK(t.reason == Termination::MaxRounds);
  CHECK(t.limit.radius.to_double() == doctest::Approx(0.5 * std::pow(0.25, 20)).epsilon(1e-12));
  CHECK(replay(t).legal);

  SchmidtBob lazy{"lazy", [](const GameConfig&, const FormalBall& a, Rng&) -> std::optional<FormalBall> { return a; }};
  auto bad = schmidt_play(c, schmidt_alice_concentric(), lazy);
  CHECK(bad.reason == Termination::BobForfeit);
  REQUIRE(bad.forfeit);
  CHECK(bad.forfeit->rule == "S3");
}

TEST_CASE("absolute to schmidt keeps Alice away from the deleted point") {
  UnitInterval Y;
  const double alpha = schmidt_alpha(Y.diffuse_beta());
  AliceStrategy sigma{"center", true, [](const GameConfig& c, const FormalBall& bob, int) {
                        return AliceChoice{{{bob.center, {0}, std::nullopt}}, Real(c.beta, c.precision) * bob.radius};
                      }};
  auto derived = absolute_to_schmidt(sigma, Y.diffuse_beta());
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GameConfig c = interval_game(0.5, 12, seed);
    c.kind = GameKind::Schmidt;
    c.alpha = alpha;
    auto t = schmidt_play(c, derived, schmidt_bob_random());
    CHECK(t.reason == Termination::MaxRounds);
    CHECK(replay(t).legal);
    CHECK(t.fallbacks() == 0);
    for (size_t i = 1; i < t.moves.size(); i += 2) {
      const auto& bob = *t.moves[i - 1].ball;
      const auto& a = *t.moves[i].ball;
      CHECK(distance(a.center, bob.center) > bob.radius * (2 * alpha));
    }
  }
}

TEST_CASE("schmidt play with the derived main strategy certifies over Q") {
  auto field = field_named("Q");
  MinkowskiSpace Y(field->layout());
  const double alpha = schmidt_alpha(Y.diffuse_beta());
  const double bob_beta = 0.5, gamma = alpha * bob_beta;
  GameConfig c;
  c.kind = GameKind::Schmidt;
  c.alpha = alpha;
  c.beta = bob_beta;
  c.field = field;
  c.playground = std::make_shared<MinkowskiSpace>(field->layout());
  c.max_rounds = 30;
  c.certifiers.push_back({gamma});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    c.seed = seed;
    auto t = schmidt_play(c, absolute_to_schmidt(alice_main_strategy(field, gamma), Y.diffuse_beta()),
                          schmidt_bob_target_seeking(on_line(1.0 / 3)));
    CHECK(replay(t).legal);
    REQUIRE(t.verdict);
    CHECK(*t.verdict == Verdict::Certified);
  }
}

TEST_CASE("schedule") {
  CHECK(schedule_round(1, 1) == 1);
  CHECK(schedule_round(1, 3) == 5);
  CHECK(schedule_round(2, 1) == 2);
  CHECK(schedule_round(2, 3) == 10);
  CHECK(schedule_round(3, 2) == 12);
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 1; m <= 4096; ++m) {
    auto [i, n] = schedule_index(m);
    CHECK(schedule_round(i, n) == m);
    seen.insert(m);
  }
  CHECK(seen.size() == 4096);
  CHECK_THROWS_AS(schedule_index(0), Error);
}

TEST_CASE("intersection of BA and its translate by 1/7") {
  auto field = field_named("Q");
  const double gamma = 0.1, b1 = gamma * gamma, b2 = b1 * b1;
  auto shift = field->from_rational(q(1, 7));
  auto sigma = intersect_strategies({alice_main_strategy(field, b1),
                                     translate_strategy(alice_main_strategy(field, b2), field, shift)});
  CHECK_FALSE(sigma.positional);
  auto c = rational_game(gamma, 40, 4);
  c.certifiers = {{b1, 1, 1, std::nullopt}, {b2, 2, 1, shift}};
  for (std::uint64_t seed : {4, 5}) {
    c.seed = seed;
    auto t = play(c, sigma, bob_target_seeking(on_line(1.0 / 7)));
    CHECK(t.reason == Termination::MaxRounds);
    REQUIRE(t.certificates.size() == 2);
    CHECK(t.certificates[0].verdict == Verdict::Certified);
    CHECK(t.certificates[1].verdict == Verdict::Certified);
  }
}

TEST_CASE("hstar reduction") {
  auto field = field_named("Q");
  auto c = rational_game(0.1, 12, 9);
  auto direct = play(c, alice_main_strategy(field, 0.1), bob_random());
  auto reduced = play(c, hstar_reduce(alice_main_strategy(field, 0.1), 1, 0.1), bob_random());
  std::ostringstream a, b;
  reduced.alice_name = direct.alice_name;
  write_transcript(a, direct);
  write_transcript(b, reduced);
  CHECK(a.str() == b.str());

  // Two points per union in the (H*2, gamma^2) game, split into single deletions.
  const double gamma = 0.2;
  AliceStrategy pair{"pair", true, [gamma](const GameConfig& cfg, const FormalBall& bob, int) {
                       Real off = bob.radius * 0.25;
                       Real rho = Real(gamma, cfg.precision) * Real(gamma, cfg.precision) * bob.radius;
                       return AliceChoice{{{on_line(bob.center[0].re - off), {0}, std::nullopt},
                                           {on_line(bob.center[0].re + off), {0}, std::nullopt}},
                                          rho};
                     }};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto ci = interval_game(gamma, 16, seed);
    auto t = play(ci, hstar_reduce(pair, 2, gamma), bob_random());
    CAPTURE(t.forfeit ? t.forfeit->message : std::string());
    CHECK(t.reason == Termination::MaxRounds);
    std::stringstream io;
    write_transcript(io, t);
    auto back = read_transcript(io);
    CHECK(replay(back).legal);
  }
  CHECK_THROWS_AS(hstar_reduce(pair, 0, gamma), Error);
}

TEST_CASE("remove countable") {
  auto c = interval_game(0.2, 20, 1);
  auto sigma = remove_countable(alice_dummy(), {on_line(0.5)}, {FamilyKind::Singletons, 1});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    c.seed = seed;
    auto t = play(c, sigma, bob_target_seeking(on_line(0.5)));
    CHECK(abs(t.limit.center[0].re - 0.5) > 0.04);
  }
  auto same = remove_countable(alice_dummy(), std::vector<SNumber>{}, {FamilyKind::Singletons, 1});
  CHECK(same.name == "dummy");
  CHECK_THROWS_AS(remove_countable(alice_dummy(), {on_line(0.5)}, {FamilyKind::HK, 1}), Error);

  auto field = field_named("Q");
  auto rc = rational_game(0.1, 30, 2);
  rc.certifiers = {{0.1, 0, 2, std::nullopt}};
  auto t = play(rc, remove_countable(alice_main_strategy(field, 0.1), field, {field->zero()}),
                bob_target_seeking(on_line(0.0)));
  REQUIRE(t.verdict);
  CHECK(*t.verdict == Verdict::Certified);
  CHECK(abs(t.limit.center[0].re) > 0.05);
}

TEST_CASE("transcript round trip and tampering") {
  auto field = field_named("Q(i)");
  GameConfig c;
  c.beta = 0.1;
  c.field = field;
  c.playground = std::make_shared<MinkowskiSpace>(field->layout());
  c.max_rounds = 10;
  c.certifiers.push_back({0.1});
  auto t = play(c, alice_main_strategy(field, 0.1), bob_hugger());
  std::stringstream io;
  write_transcript(io, t);
  const std::string text = io.str();
  auto back = read_transcript(io);
  auto rep = replay(back);
  CHECK(rep.legal);
  REQUIRE(rep.recorded_verdict);
  REQUIRE(rep.recomputed_verdict);
  CHECK(*rep.recorded_verdict == *rep.recomputed_verdict);
  std::ostringstream again;
  write_transcript(again, back);
  CHECK(again.str() == text);

  // Double one rho: the replay flags H2 at that move.
  for (auto& m : back.moves)
    if (m.choice) {
      m.choice->rho = m.choice->rho * 2.0;
      break;
    }
  rep = replay(back);
  CHECK_FALSE(rep.legal);
  REQUIRE(rep.violation);
  CHECK(rep.violation->rule == "H2");
  CHECK(*rep.bad_move == 1);

  std::istringstream junk("{\"type\":\"move\"}\n");
  CHECK_THROWS_AS(read_transcript(junk), Error);
}

TEST_CASE("config checks") {
  auto c = rational_game(1.5, 3, 1);
  CHECK_THROWS_AS(play(c, alice_dummy(), bob_random()), Error);
  c.beta = 0.1;
  c.family.N = 0;
  CHECK_THROWS_AS(play(c, alice_dummy(), bob_random()), Error);
  auto s = interval_game(0.5, 3, 1);
  s.kind = GameKind::Schmidt;
  s.alpha = 0;
  CHECK_THROWS_AS(schmidt_play(s, schmidt_alice_concentric(), schmidt_bob_random()), Error);
  CHECK(game_precision(rational_game(0.05, 30, 1)) >= 96 + 2 * 30 * std::log2(20.0));
}
