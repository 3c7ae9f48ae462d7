#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "threshq/rational.hpp"

namespace threshq::tree {

/// Reduced word in <a, b, c | a^2 = b^2 = c^2 = 1>; the empty word is the identity.
/// Vertices of the trivalent Cayley tree.
class Word {
 public:
  Word() = default;
  /// Throws InvalidArgument on letters outside {a, b, c} or a repeated letter.
  explicit Word(std::string letters);
  /// Reduces an arbitrary string over {a, b, c} by cancelling equal neighbours.
  static Word reduce(std::string_view letters);

  const std::string& str() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }
  /// The identity prints as "1".
  std::string display() const { return letters_.empty() ? "1" : letters_; }

  auto operator<=>(const Word&) const = default;

 private:
  std::string letters_;
};

Word multiply(const Word& u, const Word& v);
/// Generators are involutions, so the inverse is the reversed word.
Word inverse(const Word& u);
/// Tree distance: length of u^-1 v.
std::size_t distance(const Word& u, const Word& v);

/// All reduced words of length <= radius in shortlex order (3 * 2^radius - 2 words).
std::vector<Word> ball(std::size_t radius);

struct TreeAtom {
  Word word;
  Rational mass;
};

class TreeDistribution {
 public:
  /// Masses must be positive and sum to exactly 1; words distinct.
  explicit TreeDistribution(std::vector<TreeAtom> atoms);
  /// Weight 1/3 on each of a, b, c.
  static TreeDistribution standard();

  const std::vector<TreeAtom>& atoms() const { return atoms_; }

 private:
  std::vector<TreeAtom> atoms_;
};

struct Truncation {};  // drop the last letter; the identity maps to "a"
struct LeftTranslate {
  Word w;  // x -> x w
};
struct RightTranslate {
  Word w;  // x -> w x
};
struct Table {
  std::map<Word, Word> entries;
  Word fallback;
};

using TreeEstimator = std::variant<Truncation, LeftTranslate, RightTranslate, Table>;

std::string describe(const TreeEstimator& e);
Word evaluate(const TreeEstimator& e, const Word& x);

/// Exact Q^theta: total mass of atoms z with d(e(theta z), theta) < delta. With
/// 0 < delta < 1 this is exact recovery of theta.
Rational exact_quality(const TreeEstimator& e, const TreeDistribution& mu, const Word& theta, double delta);

struct TreeThetaQuality {
  Word theta;
  Rational q;
};

struct BallQuality {
  Rational q;       // minimum over the ball
  Word argmin;      // first minimizer in shortlex order
  std::vector<TreeThetaQuality> per_theta;
  /// True for the built-in estimators when every atom is a single letter. Then
  /// Truncation's local quality depends only on the last letter of theta,
  /// LeftTranslate's is constant, and RightTranslate w succeeds at theta only if
  /// w = theta l theta^-1 for a letter l (at most two such theta), so any
  /// radius >= 2 ball realizes the infimum. Table estimators get an upper bound.
  bool is_global_infimum = false;
};

/// Requires 0 < delta < 1, radius >= 2, and a ball of at most 10^6 words.
BallQuality quality_inf_ball(const TreeEstimator& e, const TreeDistribution& mu, double delta, std::size_t radius);

}  // namespace threshq::tree
