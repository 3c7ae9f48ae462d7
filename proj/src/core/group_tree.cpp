#include "threshq/group_tree.hpp"

#include <algorithm>
#include <set>

#include "threshq/error.hpp"

namespace threshq::tree {

namespace {

bool is_letter(char ch) { return ch == 'a' || ch == 'b' || ch == 'c'; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Word::Word(std::string letters) : letters_(std::move(letters)) {
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (!is_letter(letters_[i])) fail(ErrorCode::InvalidArgument, "word letters must be a, b or c: \"" + letters_ + "\"");
    if (i > 0 && letters_[i] == letters_[i - 1])
      fail(ErrorCode::InvalidArgument, "word is not reduced: \"" + letters_ + "\"");
  }
}

Word Word::reduce(std::string_view letters) {
  std::string out;
  out.reserve(letters.size());
  for (char ch : letters) {
    if (!is_letter(ch)) fail(ErrorCode::InvalidArgument, "word letters must be a, b or c");
    if (!out.empty() && out.back() == ch)
      out.pop_back();
    else
      out.push_back(ch);
  }
  Word w;
  w.letters_ = std::move(out);
  return w;
}

Word multiply(const Word& u, const Word& v) {
  const std::string& a = u.str();
  const std::string& b = v.str();
  // Both inputs are reduced, so cancellation only happens at the junction.
  std::size_t cancel = 0;
  while (cancel < a.size() && cancel < b.size() && a[a.size() - 1 - cancel] == b[cancel]) ++cancel;
  return Word(a.substr(0, a.size() - cancel) + b.substr(cancel));
}

Word inverse(const Word& u) { return Word(std::string(u.str().rbegin(), u.str().rend())); }

std::size_t distance(const Word& u, const Word& v) { return multiply(inverse(u), v).length(); }

std::vector<Word> ball(std::size_t radius) {
  std::vector<Word> out{Word()};
  std::vector<std::string> frontier{""};
  for (std::size_t len = 1; len <= radius; ++len) {
    std::vector<std::string> next;
    next.reserve(frontier.size() * 3);
    for (const auto& w : frontier)
      for (char ch : {'a', 'b', 'c'})
        if (w.empty() || w.back() != ch) next.push_back(w + ch);
    for (const auto& w : next) out.emplace_back(w);
    frontier = std::move(next);
  }
  return out;
}

TreeDistribution::TreeDistribution(std::vector<TreeAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) fail(ErrorCode::InvalidArgument, "tree distribution needs at least one atom");
  Rational total = 0;
  std::set<Word> seen;
  for (const auto& a : atoms_) {
    if (a.mass <= 0) fail(ErrorCode::InvalidArgument, "tree atom masses must be positive");
    if (!seen.insert(a.word).second) fail(ErrorCode::InvalidArgument, "duplicate tree atom " + a.word.display());
    total += a.mass;
  }
  if (total != 1) fail(ErrorCode::InvalidArgument, "tree atom masses sum to " + to_string(total) + ", not 1");
}

TreeDistribution TreeDistribution::standard() {
  const Rational third(1, 3);
  return TreeDistribution({{Word("a"), third}, {Word("b"), third}, {Word("c"), third}});
}

std::string describe(const TreeEstimator& e) {
  return std::visit(overloaded{
                        [](const Truncation&) { return std::string("truncation"); },
                        [](const LeftTranslate& t) { return "left_translate(" + t.w.display() + ")"; },
                        [](const RightTranslate& t) { return "right_translate(" + t.w.display() + ")"; },
                        [](const Table& t) { return "table(" + std::to_string(t.entries.size()) + " entries)"; },
                    },
                    e);
}

Word evaluate(const TreeEstimator& e, const Word& x) {
  return std::visit(overloaded{
                        [&](const Truncation&) {
                          if (x.is_identity()) return Word("a");
                          return Word(x.str().substr(0, x.length() - 1));
                        },
                        [&](const LeftTranslate& t) { return multiply(x, t.w); },
                        [&](const RightTranslate& t) { return multiply(t.w, x); },
                        [&](const Table& t) {
                          auto it = t.entries.find(x);
                          return it == t.entries.end() ? t.fallback : it->second;
                        },
                    },
                    e);
}

Rational exact_quality(const TreeEstimator& e, const TreeDistribution& mu, const Word& theta, double delta) {
  if (!(delta > 0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
  Rational q = 0;
  for (const auto& atom : mu.atoms()) {
    const Word sample = multiply(theta, atom.word);
    if (static_cast<double>(distance(evaluate(e, sample), theta)) < delta) q += atom.mass;
  }
  return q;
}

BallQuality quality_inf_ball(const TreeEstimator& e, const TreeDistribution& mu, double delta, std::size_t radius) {
  if (!(delta > 0 && delta < 1)) fail(ErrorCode::InvalidArgument, "tree quality needs 0 < delta < 1");
  if (radius < 2) fail(ErrorCode::InvalidArgument, "ball radius must be at least 2");
  if (radius > 18) fail(ErrorCode::Limit, "ball of radius > 18 exceeds 10^6 words");

  BallQuality out;
  const bool letter_atoms = std::all_of(mu.atoms().begin(), mu.atoms().end(),
                                        [](const TreeAtom& a) { return a.word.length() == 1; });
  out.is_global_infimum = letter_atoms && !std::holds_alternative<Table>(e);
  bool first = true;
  for (const Word& theta : ball(radius)) {
    Rational q = exact_quality(e, mu, theta, delta);
    if (first || q < out.q) {
      out.q = q;
      out.argmin = theta;
      first = false;
    }
    out.per_theta.push_back({theta, std::move(q)});
  }
  return out;
}

}  // namespace threshq::tree
