#ifndef NFBA_GAMES_HPP
#define NFBA_GAMES_HPP

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "nfba/flow.hpp"
#include "nfba/playground.hpp"

namespace nfba {

enum class FamilyKind { HK, Singletons };

/* H_K or singletons, taken N at a time (H^{*N}). */
struct Family {
  FamilyKind kind = FamilyKind::HK;
  int N = 1;
};

/* A member of the family: {x : x_v = anchor_v for v in places}. */
struct DeletedSet {
  SNumber anchor;
  std::vector<int> places;
  /* K-rational anchor, present for H_K members. */
  std::optional<AlgebraicNumber> exact;

  Real distance(const SNumber& x) const;
};

/* Alice's move in the absolute game; no sets is the dummy move. */
struct AliceChoice {
  std::vector<DeletedSet> sets;
  Real rho;
  bool dummy() const { return sets.empty(); }
};

/* dist(x, L_1 u ... u L_k); infinite (1e300) for the dummy move. */
Real distance_to_union(const std::vector<DeletedSet>& sets, const SNumber& x);

class UnionSet : public ClosedSet {
 public:
  explicit UnionSet(std::vector<DeletedSet> sets) : sets_(std::move(sets)) {}
  Real distance(const SNumber& x) const override { return distance_to_union(sets_, x); }
  std::string describe() const override;

 private:
  std::vector<DeletedSet> sets_;
};

enum class GameKind { Absolute, Schmidt };

/* Checks the limit point for shrinking vectors below epsilon at t_n = -1/2 log(beta r_n)
 * over selected Bob rounds, with epsilon = 2^-d (1 + 2/beta)^-d. */
struct BaCertifierSpec {
  double beta = 0.1;
  /* 0: every round; i >= 1: rounds 2^{i-1} + (n-1) 2^i. */
  int schedule_index = 0;
  int first_round = 1;
  /* Certify x - iota(shift) instead of x. */
  std::optional<AlgebraicNumber> shift;
};

struct GameConfig {
  GameKind kind = GameKind::Absolute;
  double beta = 0.1;
  double alpha = 0.5;  // Schmidt only
  Family family;
  std::shared_ptr<const NumberField> field;
  std::shared_ptr<const Playground> playground;
  int max_rounds = 30;
  /* Requested precision; the game raises it to fit the smallest radius. */
  int precision = kDefaultPrecision;
  std::optional<FormalBall> initial;
  std::vector<BaCertifierSpec> certifiers;
  std::uint64_t seed = 1;
};

/* max(requested, 96 + 2 log2(1 / r_min)) for the worst-case final radius. */
int game_precision(const GameConfig& config);
/* Validates parameter ranges; throws Error(Config). */
void check_config(const GameConfig& config);

enum class Player { Bob, Alice };

struct Move {
  int round = 0;
  Player player = Player::Bob;
  /* Bob's ball, or Alice's ball in Schmidt's game. */
  std::optional<FormalBall> ball;
  /* Alice's deletion in the absolute game. */
  std::optional<AliceChoice> choice;
  /* Alice fell back to a concentric ball (absolute_to_schmidt). */
  bool fallback = false;
};

struct Violation {
  std::string rule;
  std::string message;
};

std::optional<Violation> validate_alice(const GameConfig& config, const FormalBall& bob, const AliceChoice& choice);
std::optional<Violation> validate_bob(const GameConfig& config, const FormalBall& previous, const AliceChoice& choice,
                                      const FormalBall& next);
std::optional<Violation> validate_schmidt_alice(const GameConfig& config, const FormalBall& bob, const FormalBall& alice);
std::optional<Violation> validate_schmidt_bob(const GameConfig& config, const FormalBall& alice, const FormalBall& next);
std::optional<Violation> validate_first_ball(const GameConfig& config, const FormalBall& ball);
/* Checks next against the rules given the moves so far (which must alternate). */
std::optional<Violation> validate_move(const GameConfig& config, const std::vector<Move>& history, const Move& next);

using Rng = std::mt19937_64;

struct AliceStrategy {
  std::string name;
  bool positional = true;
  std::function<AliceChoice(const GameConfig&, const FormalBall& bob, int round)> move;
};

struct BobStrategy {
  std::string name;
  /* nullopt: no legal ball found (bob-stuck). */
  std::function<std::optional<FormalBall>(const GameConfig&, const FormalBall& previous, const AliceChoice&, Rng&)> move;
};

struct SchmidtAlice {
  std::string name;
  /* Returns Alice's ball; sets fallback when it had to ignore its absolute strategy. */
  std::function<FormalBall(const GameConfig&, const FormalBall& bob, int round, Rng&, bool& fallback)> move;
};

struct SchmidtBob {
  std::string name;
  std::function<std::optional<FormalBall>(const GameConfig&, const FormalBall& alice, Rng&)> move;
};

enum class Termination { MaxRounds, BobStuck, RadiusUnderflow, AliceForfeit, BobForfeit };
const char* to_string(Termination t);

struct Transcript {
  GameConfig config;
  std::string alice_name;
  std::string bob_name;
  std::vector<Move> moves;
  Termination reason = Termination::MaxRounds;
  std::optional<Violation> forfeit;
  FormalBall limit;
  std::vector<BACertificate> certificates;
  std::optional<Verdict> verdict;

  int bob_rounds() const;
  int fallbacks() const;
};

/* Bob's balls in order (B_1, B_2, ...). */
std::vector<FormalBall> bob_balls(const Transcript& t);

AliceStrategy alice_dummy();
/* Deletes the beta r_n neighborhoods of L(-p/q, T) for every T of weight > d/2,
 * where p/q is the unique fraction with height < epsilon on the ball at t_n. */
AliceStrategy alice_main_strategy(std::shared_ptr<const NumberField> field, double beta);
/* Conjugates a strategy by x -> x + iota(shift); its target moves by the same shift. */
AliceStrategy translate_strategy(const AliceStrategy& sigma, std::shared_ptr<const NumberField> field,
                                 const AlgebraicNumber& shift);

/* Rejection sampling, up to 10^4 draws, of a legal ball of radius beta r_n. */
BobStrategy bob_random();
BobStrategy bob_target_seeking(SNumber target);
/* Centers as close to Alice's deleted sets as H4 allows. */
BobStrategy bob_hugger();

Transcript play(const GameConfig& config, const AliceStrategy& alice, const BobStrategy& bob);

SchmidtAlice schmidt_alice_concentric();
SchmidtBob schmidt_bob_random();
SchmidtBob schmidt_bob_target_seeking(SNumber target);
Transcript schmidt_play(const GameConfig& config, const SchmidtAlice& alice, const SchmidtBob& bob);

/* alpha = beta_diffuse / (2 + beta_diffuse). */
double schmidt_alpha(double beta_diffuse);
/* On B_n asks sigma for (L_n, rho_n) and answers with an escape ball A_n of
 * radius alpha r_n whose center is farther than 2 alpha r_n from L_n. */
SchmidtAlice absolute_to_schmidt(const AliceStrategy& sigma, double beta_diffuse);

/* m = 2^{i-1} + (n-1) 2^i. */
std::uint64_t schedule_round(int i, std::uint64_t n);
/* Inverse of schedule_round. */
std::pair<int, std::uint64_t> schedule_index(std::uint64_t m);
/* Round m goes to sigma_i for the i with schedule_index(m).first == i; dummy past the list. */
AliceStrategy intersect_strategies(std::vector<AliceStrategy> sigmas);

/* Splits each union of up to N sets chosen at round kN+1 into N single-set
 * moves at rounds kN+1, ..., kN+N. */
AliceStrategy hstar_reduce(const AliceStrategy& sigma_star, int N, double gamma);

/* First |points| moves delete a family member through each point, then sigma. */
AliceStrategy remove_countable(const AliceStrategy& sigma, std::vector<SNumber> points, Family family);
/* H_K version: the points are K-rational. */
AliceStrategy remove_countable(const AliceStrategy& sigma, std::shared_ptr<const NumberField> field,
                               std::vector<AlgebraicNumber> points);

/* Runs the certifiers of config on the limit estimate and fills certificates and verdict. */
void certify_transcript(Transcript& t);
BACertificate run_certifier(const Transcript& t, const BaCertifierSpec& spec);

/* JSON lines: header, one line per move, footer. */
void write_transcript(std::ostream& out, const Transcript& t);
Transcript read_transcript(std::istream& in);

struct ReplayReport {
  bool legal = true;
  std::optional<std::size_t> bad_move;
  std::optional<Violation> violation;
  std::optional<Verdict> recorded_verdict;
  std::optional<Verdict> recomputed_verdict;
};

/* Revalidates every move and recomputes the certifier verdict. */
ReplayReport replay(const Transcript& t);

}  // namespace nfba

#endif
