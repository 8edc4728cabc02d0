#include "nfba/games.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "nfba/diffuse.hpp"
#include "nfba/error.hpp"

namespace nfba {

namespace {

using nlohmann::json;

constexpr int kBobAttempts = 10000;
constexpr double kHugMargin = 1e-9;

/* Relative slack for radius and nesting comparisons that only absorbs rounding. */
Real slack(int prec) { return pow(Real(2.0, prec), -(prec - 8)); }

bool leq_slack(const Real& a, const Real& b) { return a <= b * (slack(b.precision()) + 1.0); }

const Playground& playground_of(const GameConfig& c) {
  if (!c.playground) fail(ErrorKind::Config, "game config has no playground");
  return *c.playground;
}

std::vector<int> all_places(const PlaceLayout& layout) {
  std::vector<int> out(layout.size());
  for (int v = 0; v < layout.size(); ++v) out[v] = v;
  return out;
}

Real radius_scale(const GameConfig& c, double factor, const Real& r) { return Real(factor, c.precision) * r; }

Violation violation(std::string rule, std::string message) { return {std::move(rule), std::move(message)}; }

std::optional<Violation> check_ball_in_y(const GameConfig& c, const FormalBall& b, const char* rule) {
  if (b.center.layout() != playground_of(c).layout()) return violation(rule, "center has the wrong place layout");
  if (!(b.radius > 0.0)) return violation(rule, "radius must be positive");
  if (!playground_of(c).contains(b.center)) return violation(rule, "center is not in the playground");
  return std::nullopt;
}

bool precedes_slack(const FormalBall& inner, const FormalBall& outer) {
  return leq_slack(distance(inner.center, outer.center) + inner.radius, outer.radius);
}

SNumber real_line_point(const Real& v) { return SNumber(PlaceLayout{{PlaceKind::Real}}, {Complex(v)}, v.precision()); }

/* Points near which Bob might want to sit: on the H4 boundary of each deleted set,
 * and at the edge of the reachable region in the direction of each set. */
std::vector<SNumber> hug_points(const GameConfig& c, const FormalBall& prev, const AliceChoice& a, const Real& r2) {
  const int prec = c.precision;
  const Real reach = prev.radius - r2;
  const Real gap = (a.rho + r2) * (1.0 + kHugMargin);
  std::vector<SNumber> out;
  const auto& layout = playground_of(c).layout();
  for (const auto& s : a.sets) {
    std::vector<std::pair<double, double>> dirs{{1, 0}, {-1, 0}};
    if (layout.num_complex() > 0)
      for (int k = 1; k < 8; ++k)
        if (k != 4) dirs.push_back({std::cos(k * M_PI / 4), std::sin(k * M_PI / 4)});
    // Direction from the anchor toward the current center, then fixed directions.
    for (int pass = -1; pass < static_cast<int>(dirs.size()); ++pass) {
      SNumber hug = prev.center.with_precision(prec), toward = prev.center.with_precision(prec);
      bool ok = true;
      for (int v : s.places) {
        Complex diff = prev.center[v] - s.anchor[v];
        Real m = diff.modulus();
        Complex u(prec);
        if (pass < 0) {
          if (m.is_zero()) {
            ok = false;
            break;
          }
          u = Complex(diff.re / m, diff.im / m);
        } else {
          if (layout.kinds[v] == PlaceKind::Real && dirs[pass].second != 0.0) {
            ok = false;
            break;
          }
          u = Complex(Real(dirs[pass].first, prec), Real(dirs[pass].second, prec));
        }
        hug[v] = s.anchor[v] + u * gap;
        if (pass < 0) toward[v] = prev.center[v] - u * reach;
      }
      if (!ok) continue;
      out.push_back(hug);
      if (pass < 0) out.push_back(toward);
    }
  }
  // The Cantor set needs snapping; snap both ways and let legality decide.
  if (playground_of(c).name() == "cantor") {
    std::vector<SNumber> snapped;
    for (const auto& z : out) {
      snapped.push_back(real_line_point(CantorSet::snap_up(z[0].re)));
      snapped.push_back(real_line_point(CantorSet::snap_down(z[0].re)));
    }
    out = std::move(snapped);
  }
  return out;
}

std::optional<FormalBall> random_legal(const GameConfig& c, const FormalBall& prev, const AliceChoice& a, Rng& rng) {
  const Real r2 = radius_scale(c, c.beta, prev.radius);
  const Real reach = prev.radius - r2;
  for (int i = 0; i < kBobAttempts; ++i) {
    auto z = playground_of(c).sample(prev.center, reach, rng);
    if (!z) continue;
    FormalBall cand{std::move(*z), r2};
    if (!validate_bob(c, prev, a, cand)) return cand;
  }
  return std::nullopt;
}

/* Step from c toward target, at most reach in each place. */
SNumber step_toward(const SNumber& c, const SNumber& target, const Real& reach) {
  SNumber out = c;
  for (int v = 0; v < c.size(); ++v) {
    Complex diff = target[v] - c[v];
    Real m = diff.modulus();
    if (m <= reach)
      out[v] = target[v];
    else
      out[v] = c[v] + diff * (reach / m);
  }
  return out;
}

std::string rational_string(const Rational& q) { return q.get_str(); }

json coords_json(const AlgebraicNumber& a) {
  json out = json::array();
  for (const auto& q : a.coords()) out.push_back(rational_string(q));
  return out;
}

AlgebraicNumber coords_from_json(const json& j, int degree) {
  std::vector<Rational> coords;
  for (const auto& s : j) {
    Rational q;
    if (q.set_str(s.get<std::string>(), 10) != 0) fail(ErrorKind::Parse, "bad rational coordinate");
    q.canonicalize();
    coords.push_back(q);
  }
  if (static_cast<int>(coords.size()) != degree) fail(ErrorKind::Parse, "coordinate count does not match the degree");
  return AlgebraicNumber(std::move(coords));
}

json snumber_json(const SNumber& x) {
  json out = json::array();
  for (int v = 0; v < x.size(); ++v) {
    if (x.layout().kinds[v] == PlaceKind::Real)
      out.push_back(x[v].re.to_string());
    else
      out.push_back(json::array({x[v].re.to_string(), x[v].im.to_string()}));
  }
  return out;
}

SNumber snumber_from_json(const json& j, const PlaceLayout& layout, int prec) {
  if (!j.is_array() || static_cast<int>(j.size()) != layout.size()) fail(ErrorKind::Parse, "center has the wrong number of places");
  std::vector<Complex> vals;
  for (int v = 0; v < layout.size(); ++v) {
    if (layout.kinds[v] == PlaceKind::Real) {
      vals.emplace_back(Real::parse(j[v].get<std::string>(), prec));
    } else {
      if (!j[v].is_array() || j[v].size() != 2) fail(ErrorKind::Parse, "complex place needs [re, im]");
      vals.emplace_back(Real::parse(j[v][0].get<std::string>(), prec), Real::parse(j[v][1].get<std::string>(), prec));
    }
  }
  return SNumber(layout, std::move(vals), prec);
}

json layout_json(const PlaceLayout& layout) {
  json out = json::array();
  for (auto k : layout.kinds) out.push_back(k == PlaceKind::Real ? "real" : "complex");
  return out;
}

PlaceLayout layout_from_json(const json& j) {
  PlaceLayout layout;
  for (const auto& k : j) {
    auto s = k.get<std::string>();
    if (s == "real")
      layout.kinds.push_back(PlaceKind::Real);
    else if (s == "complex")
      layout.kinds.push_back(PlaceKind::Complex);
    else
      fail(ErrorKind::Parse, "unknown place kind '" + s + "'");
  }
  return layout;
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::Certified, Verdict::Refuted, Verdict::Inconclusive})
    if (s == to_string(v)) return v;
  fail(ErrorKind::Parse, "unknown verdict '" + s + "'");
}

Termination termination_from_string(const std::string& s) {
  for (Termination t : {Termination::MaxRounds, Termination::BobStuck, Termination::RadiusUnderflow,
                        Termination::AliceForfeit, Termination::BobForfeit})
    if (s == to_string(t)) return t;
  fail(ErrorKind::Parse, "unknown termination reason '" + s + "'");
}

FormalBall starting_ball(const GameConfig& c) {
  if (c.initial) return {c.initial->center.with_precision(c.precision), c.initial->radius.with_precision(c.precision)};
  return playground_of(c).initial_ball(c.precision);
}

}  // namespace

Real DeletedSet::distance(const SNumber& x) const {
  Real best(x.precision_bits());
  for (int v : places) best = max(best, (x[v] - anchor[v]).modulus());
  return best;
}

Real distance_to_union(const std::vector<DeletedSet>& sets, const SNumber& x) {
  Real best(1e300, x.precision_bits());
  for (const auto& s : sets) best = min(best, s.distance(x));
  return best;
}

std::string UnionSet::describe() const {
  std::string out;
  for (size_t i = 0; i < sets_.size(); ++i) {
    out += i ? " u " : "";
    out += sets_[i].exact ? "L(" + sets_[i].exact->to_string() + ")" : "L";
  }
  return out.empty() ? "{}" : out;
}

int game_precision(const GameConfig& c) {
  FormalBall start = c.initial ? *c.initial : playground_of(c).initial_ball(c.precision);
  double per_round = c.kind == GameKind::Absolute ? c.beta : c.alpha * c.beta;
  double bits = c.max_rounds * std::log2(1.0 / per_round) + std::max(0.0, -std::log2(start.radius.to_double()));
  return std::max(c.precision, 96 + static_cast<int>(std::ceil(2 * bits)));
}

void check_config(const GameConfig& c) {
  if (!(c.beta > 0 && c.beta < 1)) fail(ErrorKind::Config, "beta must lie in (0,1)");
  if (c.kind == GameKind::Schmidt && !(c.alpha > 0 && c.alpha < 1)) fail(ErrorKind::Config, "alpha must lie in (0,1)");
  if (c.family.N < 1) fail(ErrorKind::Config, "family N must be at least 1");
  if (c.max_rounds < 0) fail(ErrorKind::Config, "max_rounds must be nonnegative");
  const auto& Y = playground_of(c);
  if (c.field && c.field->layout() != Y.layout()) fail(ErrorKind::Config, "playground and field have different places");
  if (c.family.kind == FamilyKind::HK && !c.field) fail(ErrorKind::Config, "the H_K family needs a field");
  for (const auto& s : c.certifiers) {
    if (!c.field) fail(ErrorKind::Config, "certifiers need a field");
    if (!(s.beta > 0 && s.beta < 1)) fail(ErrorKind::Config, "certifier beta must lie in (0,1)");
  }
}

std::optional<Violation> validate_first_ball(const GameConfig& c, const FormalBall& b) { return check_ball_in_y(c, b, "H1"); }

std::optional<Violation> validate_alice(const GameConfig& c, const FormalBall& bob, const AliceChoice& a) {
  if (!(a.rho > 0.0)) return violation("H2", "rho must be positive");
  if (!leq_slack(a.rho, radius_scale(c, c.beta, bob.radius))) return violation("H2", "rho exceeds beta r_n");
  if (static_cast<int>(a.sets.size()) > c.family.N)
    return violation("H2", "union of " + std::to_string(a.sets.size()) + " sets exceeds N = " + std::to_string(c.family.N));
  const auto& layout = playground_of(c).layout();
  for (const auto& s : a.sets) {
    if (s.anchor.layout() != layout) return violation("H2", "deleted set has the wrong place layout");
    for (int v : s.places)
      if (v < 0 || v >= layout.size()) return violation("H2", "deleted set names a missing place");
    if (c.family.kind == FamilyKind::Singletons) {
      if (s.places != all_places(layout)) return violation("H2", "singleton family needs T = all places");
    } else {
      if (!s.exact) return violation("H2", "H_K member needs a K-rational anchor");
      if (!hk_family_check(layout, s.places)) return violation("H2", "T does not have weight above d/2");
    }
  }
  return std::nullopt;
}

std::optional<Violation> validate_bob(const GameConfig& c, const FormalBall& prev, const AliceChoice& a,
                                      const FormalBall& next) {
  if (auto v = check_ball_in_y(c, next, "H1")) return v;
  if (!leq_slack(next.radius, prev.radius)) return violation("H3", "radius grew");
  if (!leq_slack(radius_scale(c, c.beta, prev.radius), next.radius)) return violation("H3", "radius below beta r_n");
  if (!precedes_slack(next, prev)) return violation("H3", "ball is not nested in the previous one");
  for (const auto& s : a.sets)
    if (!(s.distance(next.center) - (a.rho + next.radius) > 0.0))
      return violation("H4", "center within rho_n + r_{n+1} of a deleted set");
  return std::nullopt;
}

std::optional<Violation> validate_schmidt_alice(const GameConfig& c, const FormalBall& bob, const FormalBall& alice) {
  if (auto v = check_ball_in_y(c, alice, "S1")) return v;
  Real want = radius_scale(c, c.alpha, bob.radius);
  if (!(abs(alice.radius - want) <= want * slack(c.precision))) return violation("S2", "r(A_n) != alpha r(B_n)");
  if (!precedes_slack(alice, bob)) return violation("S2", "A_n is not nested in B_n");
  return std::nullopt;
}

std::optional<Violation> validate_schmidt_bob(const GameConfig& c, const FormalBall& alice, const FormalBall& next) {
  if (auto v = check_ball_in_y(c, next, "S1")) return v;
  Real want = radius_scale(c, c.beta, alice.radius);
  if (!(abs(next.radius - want) <= want * slack(c.precision))) return violation("S3", "r(B_{n+1}) != beta r(A_n)");
  if (!precedes_slack(next, alice)) return violation("S3", "B_{n+1} is not nested in A_n");
  return std::nullopt;
}

std::optional<Violation> validate_move(const GameConfig& c, const std::vector<Move>& history, const Move& next) {
  if (history.empty()) {
    if (next.player != Player::Bob || !next.ball) return violation("turn", "the first move is Bob's ball");
    return validate_first_ball(c, *next.ball);
  }
  const Move& last = history.back();
  if (last.player == next.player) return violation("turn", "moves must alternate");
  if (next.player == Player::Alice) {
    if (!last.ball) return violation("turn", "Alice answers a Bob ball");
    if (c.kind == GameKind::Absolute) {
      if (!next.choice) return violation("H2", "Alice move has no deletion");
      return validate_alice(c, *last.ball, *next.choice);
    }
    if (!next.ball) return violation("S2", "Alice move has no ball");
    return validate_schmidt_alice(c, *last.ball, *next.ball);
  }
  if (!next.ball) return violation(c.kind == GameKind::Absolute ? "H1" : "S3", "Bob move has no ball");
  if (c.kind == GameKind::Schmidt) {
    if (!last.ball) return violation("S3", "previous Alice move has no ball");
    return validate_schmidt_bob(c, *last.ball, *next.ball);
  }
  if (history.size() < 2 || !history[history.size() - 2].ball || !last.choice)
    return violation("turn", "Bob answers an Alice deletion");
  return validate_bob(c, *history[history.size() - 2].ball, *last.choice, *next.ball);
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::MaxRounds: return "max-rounds";
    case Termination::BobStuck: return "bob-stuck";
    case Termination::RadiusUnderflow: return "radius-underflow";
    case Termination::AliceForfeit: return "alice-forfeit";
    case Termination::BobForfeit: return "bob-forfeit";
  }
  return "?";
}

int Transcript::bob_rounds() const {
  return static_cast<int>(std::count_if(moves.begin(), moves.end(), [](const Move& m) { return m.player == Player::Bob; }));
}

int Transcript::fallbacks() const {
  return static_cast<int>(std::count_if(moves.begin(), moves.end(), [](const Move& m) { return m.fallback; }));
}

std::vector<FormalBall> bob_balls(const Transcript& t) {
  std::vector<FormalBall> out;
  for (const auto& m : t.moves)
    if (m.player == Player::Bob && m.ball) out.push_back(*m.ball);
  return out;
}

AliceStrategy alice_dummy() {
  return {"dummy", true, [](const GameConfig& c, const FormalBall& bob, int) {
            return AliceChoice{{}, radius_scale(c, c.beta, bob.radius)};
          }};
}

AliceStrategy alice_main_strategy(std::shared_ptr<const NumberField> field, double beta) {
  if (!field) fail(ErrorKind::Config, "alice main strategy needs a field");
  if (!(beta > 0 && beta < 1)) fail(ErrorKind::Config, "beta must lie in (0,1)");
  return {"main", true, [field, beta](const GameConfig& c, const FormalBall& bob, int) {
            const int prec = std::max(c.precision, bob.center.precision_bits());
            Real rho = Real(beta, prec) * bob.radius;
            Real t = log(rho) * -0.5;
            Real eps = uniqueness_epsilon(field->degree(), t, bob.radius);
            AliceChoice out{{}, rho};
            auto found = find_small_fraction(*field, bob.center, bob.radius, t, eps);
            if (!found) return out;
            AlgebraicNumber anchor = field->div(-field->from_integral(found->pt.p), field->from_integral(found->pt.q));
            SNumber embedded = embed(*field, anchor, prec);
            for (auto& T : hk_qualifying_subsets(field->layout())) out.sets.push_back({embedded, T, anchor});
            return out;
          }};
}

AliceStrategy translate_strategy(const AliceStrategy& sigma, std::shared_ptr<const NumberField> field,
                                 const AlgebraicNumber& shift) {
  if (!field) fail(ErrorKind::Config, "translation needs a field");
  return {sigma.name + "+shift", sigma.positional, [sigma, field, shift](const GameConfig& c, const FormalBall& bob, int round) {
            const int prec = std::max(c.precision, bob.center.precision_bits());
            SNumber s = embed(*field, shift, prec);
            AliceChoice out = sigma.move(c, {bob.center - s, bob.radius}, round);
            for (auto& set : out.sets) {
              set.anchor = set.anchor + s;
              if (set.exact) set.exact = *set.exact + shift;
            }
            return out;
          }};
}

BobStrategy bob_random() {
  return {"random", [](const GameConfig& c, const FormalBall& prev, const AliceChoice& a, Rng& rng) {
            return random_legal(c, prev, a, rng);
          }};
}

BobStrategy bob_target_seeking(SNumber target) {
  return {"target", [target](const GameConfig& c, const FormalBall& prev, const AliceChoice& a, Rng& rng) -> std::optional<FormalBall> {
            const Playground& Y = playground_of(c);
            const Real r2 = radius_scale(c, c.beta, prev.radius);
            const Real reach = prev.radius - r2;
            SNumber goal = target.with_precision(c.precision);
            SNumber step = step_toward(prev.center, goal, reach);
            FormalBall direct{step, r2};
            if (!validate_bob(c, prev, a, direct)) return direct;

            std::optional<FormalBall> best;
            Real best_dist(c.precision);
            auto consider = [&](const SNumber& z) {
              FormalBall cand{z, r2};
              if (validate_bob(c, prev, a, cand)) return;
              Real dz = distance(z, goal);
              if (!best || dz < best_dist) {
                best = std::move(cand);
                best_dist = dz;
              }
            };
            for (const auto& z : Y.candidates(step, r2)) consider(z);
            for (const auto& z : Y.candidates(prev.center, reach)) consider(z);
            for (const auto& z : hug_points(c, prev, a, r2)) consider(z);
            for (int i = 0; i < 512; ++i)
              if (auto z = Y.sample(prev.center, reach, rng)) consider(*z);
            if (best) return best;
            return random_legal(c, prev, a, rng);
          }};
}

BobStrategy bob_hugger() {
  return {"hugger", [](const GameConfig& c, const FormalBall& prev, const AliceChoice& a, Rng& rng) -> std::optional<FormalBall> {
            if (a.dummy()) return random_legal(c, prev, a, rng);
            const Real r2 = radius_scale(c, c.beta, prev.radius);
            std::optional<FormalBall> best;
            Real best_dist(c.precision);
            for (const auto& z : hug_points(c, prev, a, r2)) {
              FormalBall cand{z, r2};
              if (validate_bob(c, prev, a, cand)) continue;
              Real dz = distance_to_union(a.sets, z);
              if (!best || dz < best_dist) {
                best = std::move(cand);
                best_dist = dz;
              }
            }
            if (best) return best;
            return random_legal(c, prev, a, rng);
          }};
}

Transcript play(const GameConfig& config, const AliceStrategy& alice, const BobStrategy& bob) {
  check_config(config);
  if (config.kind != GameKind::Absolute) fail(ErrorKind::Config, "play runs the absolute game");
  Transcript t;
  t.config = config;
  t.config.precision = game_precision(config);
  t.alice_name = alice.name;
  t.bob_name = bob.name;
  const GameConfig& c = t.config;
  Rng rng(c.seed);

  FormalBall B = starting_ball(c);
  if (auto v = validate_first_ball(c, B)) fail(ErrorKind::Config, "initial ball: " + v->message);
  t.moves.push_back({1, Player::Bob, B, std::nullopt});
  const Real underflow = pow(Real(2.0, c.precision), -(c.precision - 16));
  for (int n = 1; n <= c.max_rounds; ++n) {
    if (B.radius < underflow) {
      t.reason = Termination::RadiusUnderflow;
      break;
    }
    AliceChoice a = alice.move(c, B, n);
    if (auto v = validate_alice(c, B, a)) {
      t.reason = Termination::AliceForfeit;
      t.forfeit = v;
      break;
    }
    t.moves.push_back({n, Player::Alice, std::nullopt, a});
    auto next = bob.move(c, B, a, rng);
    if (!next) {
      t.reason = Termination::BobStuck;
      break;
    }
    if (auto v = validate_bob(c, B, a, *next)) {
      t.reason = Termination::BobForfeit;
      t.forfeit = v;
      break;
    }
    B = *next;
    t.moves.push_back({n + 1, Player::Bob, B, std::nullopt});
  }
  t.limit = B;
  certify_transcript(t);
  return t;
}

SchmidtAlice schmidt_alice_concentric() {
  return {"concentric", [](const GameConfig& c, const FormalBall& bob, int, Rng&, bool&) {
            return FormalBall{bob.center, radius_scale(c, c.alpha, bob.radius)};
          }};
}

SchmidtBob schmidt_bob_random() {
  return {"random", [](const GameConfig& c, const FormalBall& a, Rng& rng) -> std::optional<FormalBall> {
            const Real r2 = radius_scale(c, c.beta, a.radius);
            const Real reach = a.radius - r2;
            for (int i = 0; i < kBobAttempts; ++i) {
              auto z = playground_of(c).sample(a.center, reach, rng);
              if (!z) continue;
              FormalBall cand{std::move(*z), r2};
              if (!validate_schmidt_bob(c, a, cand)) return cand;
            }
            return std::nullopt;
          }};
}

SchmidtBob schmidt_bob_target_seeking(SNumber target) {
  return {"target", [target](const GameConfig& c, const FormalBall& a, Rng& rng) -> std::optional<FormalBall> {
            const Playground& Y = playground_of(c);
            const Real r2 = radius_scale(c, c.beta, a.radius);
            const Real reach = a.radius - r2;
            SNumber goal = target.with_precision(c.precision);
            SNumber step = step_toward(a.center, goal, reach);
            std::optional<FormalBall> best;
            Real best_dist(c.precision);
            auto consider = [&](const SNumber& z) {
              FormalBall cand{z, r2};
              if (validate_schmidt_bob(c, a, cand)) return;
              Real dz = distance(z, goal);
              if (!best || dz < best_dist) {
                best = std::move(cand);
                best_dist = dz;
              }
            };
            consider(step);
            if (best) return best;
            for (const auto& z : Y.candidates(step, r2)) consider(z);
            for (const auto& z : Y.candidates(a.center, reach)) consider(z);
            for (int i = 0; i < 256; ++i)
              if (auto z = Y.sample(a.center, reach, rng)) consider(*z);
            return best;
          }};
}

Transcript schmidt_play(const GameConfig& config, const SchmidtAlice& alice, const SchmidtBob& bob) {
  check_config(config);
  if (config.kind != GameKind::Schmidt) fail(ErrorKind::Config, "schmidt_play runs Schmidt's game");
  Transcript t;
  t.config = config;
  t.config.precision = game_precision(config);
  t.alice_name = alice.name;
  t.bob_name = bob.name;
  const GameConfig& c = t.config;
  Rng rng(c.seed);

  FormalBall B = starting_ball(c);
  if (auto v = validate_first_ball(c, B)) fail(ErrorKind::Config, "initial ball: " + v->message);
  t.moves.push_back({1, Player::Bob, B, std::nullopt});
  const Real underflow = pow(Real(2.0, c.precision), -(c.precision - 16));
  for (int n = 1; n <= c.max_rounds; ++n) {
    if (B.radius < underflow) {
      t.reason = Termination::RadiusUnderflow;
      break;
    }
    bool fallback = false;
    FormalBall A = alice.move(c, B, n, rng, fallback);
    if (auto v = validate_schmidt_alice(c, B, A)) {
      t.reason = Termination::AliceForfeit;
      t.forfeit = v;
      break;
    }
    Move am{n, Player::Alice, A, std::nullopt};
    am.fallback = fallback;
    t.moves.push_back(std::move(am));
    auto next = bob.move(c, A, rng);
    if (!next) {
      t.reason = Termination::BobStuck;
      break;
    }
    if (auto v = validate_schmidt_bob(c, A, *next)) {
      t.reason = Termination::BobForfeit;
      t.forfeit = v;
      break;
    }
    B = *next;
    t.moves.push_back({n + 1, Player::Bob, B, std::nullopt});
  }
  t.limit = B;
  certify_transcript(t);
  return t;
}

double schmidt_alpha(double beta_diffuse) {
  if (!(beta_diffuse > 0 && beta_diffuse < 1)) fail(ErrorKind::Precondition, "diffuseness beta must lie in (0,1)");
  return beta_diffuse / (2 + beta_diffuse);
}

SchmidtAlice absolute_to_schmidt(const AliceStrategy& sigma, double beta_diffuse) {
  const double alpha = schmidt_alpha(beta_diffuse);
  return {"schmidt(" + sigma.name + ")", [sigma, alpha](const GameConfig& c, const FormalBall& bob, int round, Rng& rng, bool& fallback) {
            FormalBall concentric{bob.center, radius_scale(c, c.alpha, bob.radius)};
            AliceChoice choice = sigma.move(c, bob, round);
            if (choice.dummy()) return concentric;
            UnionSet L(choice.sets);
            try {
              SNumber z = diffuse_escape(playground_of(c), bob.center, bob.radius, L, alpha, rng);
              return FormalBall{std::move(z), radius_scale(c, c.alpha, bob.radius)};
            } catch (const Error& e) {
              if (e.kind() != ErrorKind::Budget) throw;
              // Shrink first: a concentric ball, so the next query sees a smaller radius.
              fallback = true;
              return concentric;
            }
          }};
}

std::uint64_t schedule_round(int i, std::uint64_t n) {
  if (i < 1 || i > 63 || n < 1) fail(ErrorKind::Domain, "schedule needs i, n >= 1");
  return (std::uint64_t{1} << (i - 1)) + (n - 1) * (std::uint64_t{1} << i);
}

std::pair<int, std::uint64_t> schedule_index(std::uint64_t m) {
  if (m == 0) fail(ErrorKind::Domain, "schedule rounds start at 1");
  int i = std::countr_zero(m) + 1;
  return {i, ((m >> (i - 1)) + 1) / 2};
}

AliceStrategy intersect_strategies(std::vector<AliceStrategy> sigmas) {
  std::string name = "intersect(";
  for (size_t k = 0; k < sigmas.size(); ++k) name += (k ? "," : "") + sigmas[k].name;
  name += ")";
  return {name, false, [sigmas = std::move(sigmas)](const GameConfig& c, const FormalBall& bob, int round) {
            auto [i, n] = schedule_index(static_cast<std::uint64_t>(round));
            if (i > static_cast<int>(sigmas.size())) return AliceChoice{{}, radius_scale(c, c.beta, bob.radius)};
            return sigmas[i - 1].move(c, bob, static_cast<int>(n));
          }};
}

AliceStrategy hstar_reduce(const AliceStrategy& sigma_star, int N, double gamma) {
  if (N < 1) fail(ErrorKind::Precondition, "N must be at least 1");
  if (!(gamma > 0 && gamma < 1)) fail(ErrorKind::Precondition, "gamma must lie in (0,1)");
  auto pending = std::make_shared<AliceChoice>();
  return {"hstar(" + sigma_star.name + ")", N == 1 && sigma_star.positional,
          [sigma_star, N, pending](const GameConfig& c, const FormalBall& bob, int round) {
            const int k = (round - 1) / N, j = (round - 1) % N;
            if (j == 0) *pending = sigma_star.move(c, bob, k + 1);
            AliceChoice out{{}, pending->rho};
            if (j < static_cast<int>(pending->sets.size())) out.sets.push_back(pending->sets[j]);
            return out;
          }};
}

AliceStrategy remove_countable(const AliceStrategy& sigma, std::vector<SNumber> points, Family family) {
  if (points.empty()) return sigma;
  if (family.kind != FamilyKind::Singletons)
    fail(ErrorKind::Precondition, "point not coverable by any family set: H_K anchors must be K-rational");
  const int count = static_cast<int>(points.size());
  return {"remove(" + sigma.name + ")", false, [sigma, points = std::move(points), count](const GameConfig& c, const FormalBall& bob, int round) {
            if (round > count) return sigma.move(c, bob, round - count);
            const SNumber& z = points[round - 1];
            return AliceChoice{{{z.with_precision(c.precision), all_places(z.layout()), std::nullopt}},
                               radius_scale(c, c.beta, bob.radius)};
          }};
}

AliceStrategy remove_countable(const AliceStrategy& sigma, std::shared_ptr<const NumberField> field,
                               std::vector<AlgebraicNumber> points) {
  if (points.empty()) return sigma;
  if (!field) fail(ErrorKind::Precondition, "H_K points need a field");
  for (const auto& p : points)
    if (p.degree() != field->degree()) fail(ErrorKind::Precondition, "point not coverable by any family set: wrong degree");
  const int count = static_cast<int>(points.size());
  return {"remove(" + sigma.name + ")", false,
          [sigma, field, points = std::move(points), count](const GameConfig& c, const FormalBall& bob, int round) {
            if (round > count) return sigma.move(c, bob, round - count);
            const AlgebraicNumber& a = points[round - 1];
            return AliceChoice{{{embed(*field, a, c.precision), all_places(field->layout()), a}},
                               radius_scale(c, c.beta, bob.radius)};
          }};
}

BACertificate run_certifier(const Transcript& t, const BaCertifierSpec& spec) {
  const auto& c = t.config;
  if (!c.field) fail(ErrorKind::Config, "certifier needs a field");
  const NumberField& field = *c.field;
  const int prec = c.precision;
  const int d = field.degree();
  auto balls = bob_balls(t);
  Real b(spec.beta, prec);
  std::vector<Real> times;
  // Round n counts only if Alice moved on B_n and Bob answered with B_{n+1}.
  for (size_t n = 1; n < balls.size(); ++n) {
    if (static_cast<int>(n) < spec.first_round) continue;
    if (spec.schedule_index > 0 && schedule_index(n).first != spec.schedule_index) continue;
    Real tn = log(b * balls[n - 1].radius) * -0.5;
    if (times.empty() || tn > times.back()) times.push_back(tn);
  }
  Real eps = pow(Real(2.0, prec) * (Real(2.0, prec) / b + 1.0), -static_cast<long>(d));
  if (times.empty()) {
    BACertificate cert;
    cert.epsilon = eps;
    cert.verdict = Verdict::Inconclusive;
    return cert;
  }
  SNumber x = t.limit.center.with_precision(prec);
  if (spec.shift) x = x - embed(field, *spec.shift, prec);
  return certify_ba_schedule(field, x, times, eps);
}

void certify_transcript(Transcript& t) {
  t.certificates.clear();
  t.verdict.reset();
  if (t.config.certifiers.empty()) return;
  bool all = true, refuted = false;
  for (const auto& spec : t.config.certifiers) {
    t.certificates.push_back(run_certifier(t, spec));
    all = all && t.certificates.back().verdict == Verdict::Certified;
    refuted = refuted || t.certificates.back().verdict == Verdict::Refuted;
  }
  t.verdict = refuted ? Verdict::Refuted : (all ? Verdict::Certified : Verdict::Inconclusive);
}

void write_transcript(std::ostream& out, const Transcript& t) {
  const auto& c = t.config;
  const auto& layout = playground_of(c).layout();
  json certs = json::array();
  for (const auto& s : c.certifiers)
    certs.push_back({{"beta", s.beta},
                     {"schedule_index", s.schedule_index},
                     {"first_round", s.first_round},
                     {"shift", s.shift ? coords_json(*s.shift) : json(nullptr)}});
  json header = {{"type", "header"},
                 {"game", c.kind == GameKind::Absolute ? "absolute" : "schmidt"},
                 {"beta", c.beta},
                 {"alpha", c.alpha},
                 {"family", {{"kind", c.family.kind == FamilyKind::HK ? "HK" : "singletons"}, {"N", c.family.N}}},
                 {"field", c.field ? c.field->config().to_json() : json(nullptr)},
                 {"playground", playground_of(c).name()},
                 {"layout", layout_json(layout)},
                 {"max_rounds", c.max_rounds},
                 {"precision", c.precision},
                 {"seed", c.seed},
                 {"alice", t.alice_name},
                 {"bob", t.bob_name},
                 {"certifiers", certs}};
  out << header.dump() << '\n';
  for (const auto& m : t.moves) {
    json j = {{"type", "move"}, {"round", m.round}, {"player", m.player == Player::Bob ? "bob" : "alice"}};
    if (m.ball) {
      j["center"] = snumber_json(m.ball->center);
      j["radius"] = m.ball->radius.to_string();
    }
    if (m.choice) {
      json del = json::array();
      for (const auto& s : m.choice->sets) {
        json e = {{"T", s.places}};
        if (s.exact) {
          e["anchor_p"] = coords_json(*s.exact);
          e["anchor_q"] = coords_json(AlgebraicNumber::constant(s.exact->degree(), 1));
        } else {
          e["point"] = snumber_json(s.anchor);
        }
        del.push_back(std::move(e));
      }
      j["deleted"] = std::move(del);
      j["rho"] = m.choice->rho.to_string();
    }
    if (m.fallback) j["fallback"] = true;
    out << j.dump() << '\n';
  }
  json footer = {{"type", "footer"},
                 {"terminated_reason", to_string(t.reason)},
                 {"limit_estimate", {{"center", snumber_json(t.limit.center)}, {"radius", t.limit.radius.to_string()}}},
                 {"certifier_verdict", t.verdict ? json(to_string(*t.verdict)) : json(nullptr)}};
  if (t.forfeit) footer["forfeit"] = {{"rule", t.forfeit->rule}, {"message", t.forfeit->message}};
  out << footer.dump() << '\n';
}

Transcript read_transcript(std::istream& in) {
  Transcript t;
  std::string line;
  bool have_header = false, have_footer = false;
  int lineno = 0;
  std::shared_ptr<const NumberField> field;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json j = json::parse(line);
      const std::string type = j.value("type", "move");
      if (type == "header") {
        auto& c = t.config;
        c.kind = j.at("game").get<std::string>() == "schmidt" ? GameKind::Schmidt : GameKind::Absolute;
        c.beta = j.at("beta").get<double>();
        c.alpha = j.at("alpha").get<double>();
        c.family.kind = j.at("family").at("kind").get<std::string>() == "HK" ? FamilyKind::HK : FamilyKind::Singletons;
        c.family.N = j.at("family").at("N").get<int>();
        if (!j.at("field").is_null()) field = std::make_shared<NumberField>(NumberField::from_json(j.at("field")));
        c.field = field;
        PlaceLayout layout = layout_from_json(j.at("layout"));
        c.playground = std::shared_ptr<const Playground>(make_playground(j.at("playground").get<std::string>(), layout));
        c.max_rounds = j.at("max_rounds").get<int>();
        c.precision = j.at("precision").get<int>();
        c.seed = j.at("seed").get<std::uint64_t>();
        t.alice_name = j.value("alice", "");
        t.bob_name = j.value("bob", "");
        for (const auto& s : j.at("certifiers")) {
          BaCertifierSpec spec;
          spec.beta = s.at("beta").get<double>();
          spec.schedule_index = s.at("schedule_index").get<int>();
          spec.first_round = s.at("first_round").get<int>();
          if (!s.at("shift").is_null()) {
            if (!field) fail(ErrorKind::Parse, "certifier shift needs a field");
            spec.shift = coords_from_json(s.at("shift"), field->degree());
          }
          c.certifiers.push_back(std::move(spec));
        }
        have_header = true;
        continue;
      }
      if (!have_header) fail(ErrorKind::Parse, "transcript must start with a header");
      const auto& c = t.config;
      const auto& layout = c.playground->layout();
      if (type == "footer") {
        t.reason = termination_from_string(j.at("terminated_reason").get<std::string>());
        const auto& lim = j.at("limit_estimate");
        t.limit = {snumber_from_json(lim.at("center"), layout, c.precision), Real::parse(lim.at("radius").get<std::string>(), c.precision)};
        if (!j.at("certifier_verdict").is_null()) t.verdict = verdict_from_string(j.at("certifier_verdict").get<std::string>());
        if (j.contains("forfeit"))
          t.forfeit = Violation{j["forfeit"].at("rule").get<std::string>(), j["forfeit"].at("message").get<std::string>()};
        have_footer = true;
        continue;
      }
      Move m;
      m.round = j.at("round").get<int>();
      const std::string player = j.at("player").get<std::string>();
      if (player != "bob" && player != "alice") fail(ErrorKind::Parse, "unknown player '" + player + "'");
      m.player = player == "bob" ? Player::Bob : Player::Alice;
      if (j.contains("center"))
        m.ball = FormalBall{snumber_from_json(j["center"], layout, c.precision), Real::parse(j.at("radius").get<std::string>(), c.precision)};
      if (j.contains("deleted")) {
        AliceChoice a{{}, Real::parse(j.at("rho").get<std::string>(), c.precision)};
        for (const auto& e : j["deleted"]) {
          DeletedSet s;
          s.places = e.at("T").get<std::vector<int>>();
          if (e.contains("anchor_p")) {
            if (!field) fail(ErrorKind::Parse, "K-rational anchors need a field");
            AlgebraicNumber p = coords_from_json(e["anchor_p"], field->degree());
            AlgebraicNumber q = coords_from_json(e.at("anchor_q"), field->degree());
            if (q.is_zero()) fail(ErrorKind::Parse, "anchor_q is zero");
            s.exact = field->div(p, q);
            s.anchor = embed(*field, *s.exact, c.precision);
          } else {
            s.anchor = snumber_from_json(e.at("point"), layout, c.precision);
          }
          a.sets.push_back(std::move(s));
        }
        m.choice = std::move(a);
      }
      m.fallback = j.value("fallback", false);
      t.moves.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, "transcript line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!have_header) fail(ErrorKind::Parse, "transcript has no header");
  if (!have_footer) {
    auto balls = bob_balls(t);
    if (balls.empty()) fail(ErrorKind::Parse, "transcript has no moves");
    t.limit = balls.back();
  }
  return t;
}

ReplayReport replay(const Transcript& t) {
  ReplayReport rep;
  rep.recorded_verdict = t.verdict;
  std::vector<Move> history;
  for (size_t i = 0; i < t.moves.size(); ++i) {
    if (auto v = validate_move(t.config, history, t.moves[i])) {
      rep.legal = false;
      rep.bad_move = i;
      rep.violation = v;
      break;
    }
    history.push_back(t.moves[i]);
  }
  Transcript copy = t;
  certify_transcript(copy);
  rep.recomputed_verdict = copy.verdict;
  return rep;
}

}  // namespace nfba
