#ifndef NFBA_PLAYGROUND_HPP
#define NFBA_PLAYGROUND_HPP

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nfba/numberfield.hpp"

namespace nfba {

/* (center, radius); stands for the closed ball B(center, radius) in the sup metric of K_S. */
struct FormalBall {
  SNumber center;
  Real radius;
};

/* (inner) precedes (outer): ||c - c'|| + r' <= r. */
bool ball_precedes(const FormalBall& inner, const FormalBall& outer);

class ClosedSet {
 public:
  virtual ~ClosedSet() = default;
  virtual Real distance(const SNumber& x) const = 0;
  virtual std::string describe() const = 0;
};

class SingletonSet : public ClosedSet {
 public:
  explicit SingletonSet(SNumber point) : point_(std::move(point)) {}
  Real distance(const SNumber& x) const override;
  std::string describe() const override;
  const SNumber& point() const { return point_; }

 private:
  SNumber point_;
};

/* L(anchor, T) = {x : x_v = iota_v(anchor) for v in T}. */
class SubspaceSet : public ClosedSet {
 public:
  SubspaceSet(const NumberField& field, SubspaceHK subspace, int precision_bits);
  SubspaceSet(SNumber anchor, std::vector<int> places);
  Real distance(const SNumber& x) const override;
  std::string describe() const override;
  const SNumber& anchor() const { return anchor_; }
  const std::vector<int>& places() const { return places_; }

 private:
  SNumber anchor_;
  std::vector<int> places_;
};

class Playground {
 public:
  virtual ~Playground() = default;
  virtual std::string name() const = 0;
  virtual const PlaceLayout& layout() const = 0;
  /* Membership to working precision. */
  virtual bool contains(const SNumber& x) const = 0;
  /* One random draw of a point of Y within r of c; nullopt when the draw misses. */
  virtual std::optional<SNumber> sample(const SNumber& c, const Real& r, std::mt19937_64& rng) const = 0;
  /* Deterministic points of Y within r of c, including the extreme ones. */
  virtual std::vector<SNumber> candidates(const SNumber& c, const Real& r) const = 0;
  /* A beta for which Y is (H, beta)-diffuse for its family. */
  virtual double diffuse_beta() const = 0;
  /* Starting ball for games. */
  virtual FormalBall initial_ball(int precision_bits) const = 0;
};

/* All of K_S. */
class MinkowskiSpace : public Playground {
 public:
  explicit MinkowskiSpace(PlaceLayout layout) : layout_(std::move(layout)) {}
  std::string name() const override { return "minkowski"; }
  const PlaceLayout& layout() const override { return layout_; }
  bool contains(const SNumber&) const override { return true; }
  std::optional<SNumber> sample(const SNumber& c, const Real& r, std::mt19937_64& rng) const override;
  std::vector<SNumber> candidates(const SNumber& c, const Real& r) const override;
  double diffuse_beta() const override;
  FormalBall initial_ball(int precision_bits) const override;

 private:
  PlaceLayout layout_;
};

/* [0, 1] inside K_S = R. */
class UnitInterval : public Playground {
 public:
  UnitInterval();
  std::string name() const override { return "interval"; }
  const PlaceLayout& layout() const override { return layout_; }
  bool contains(const SNumber& x) const override;
  std::optional<SNumber> sample(const SNumber& c, const Real& r, std::mt19937_64& rng) const override;
  std::vector<SNumber> candidates(const SNumber& c, const Real& r) const override;
  double diffuse_beta() const override { return 0.45; }
  FormalBall initial_ball(int precision_bits) const override;

 private:
  PlaceLayout layout_;
};

/* Middle-thirds Cantor set inside K_S = R. */
class CantorSet : public Playground {
 public:
  CantorSet();
  std::string name() const override { return "cantor"; }
  const PlaceLayout& layout() const override { return layout_; }
  bool contains(const SNumber& x) const override;
  std::optional<SNumber> sample(const SNumber& c, const Real& r, std::mt19937_64& rng) const override;
  std::vector<SNumber> candidates(const SNumber& c, const Real& r) const override;
  double diffuse_beta() const override;
  FormalBall initial_ball(int precision_bits) const override;

  /* Largest point of the set <= u, and smallest >= u (u clamped to [0,1]). */
  static Real snap_down(const Real& u);
  static Real snap_up(const Real& u);

 private:
  PlaceLayout layout_;
};

/* "minkowski", "interval" or "cantor"; the latter two need K = Q. */
std::unique_ptr<Playground> make_playground(const std::string& name, const PlaceLayout& layout);

}  // namespace nfba

#endif
