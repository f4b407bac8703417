#include "coarse/groups.hpp"

#include "coarse/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

namespace coarse {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

std::int64_t parse_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw DomainError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at each step.
    const std::uint64_t num = n - k + i;
    const std::uint64_t g = std::gcd(r, i);
    r = sat_mul(r / g, num / (i / g));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Z^d with generators +-e_i.

class FreeAbelian final : public GroupModel {
 public:
  explicit FreeAbelian(std::int64_t d) : d_(d) {}

  std::string spec() const override { return "Zd:" + std::to_string(d_); }
  Element identity() const override { return {std::vector<std::int64_t>(d_, 0)}; }

  Element multiply(const Element& g, const Element& h) const override {
    Element out = g;
    for (std::int64_t i = 0; i < d_; ++i) out.word[i] += h.word[i];
    return out;
  }
  Element invert(const Element& g) const override {
    Element out = g;
    for (auto& v : out.word) v = -v;
    return out;
  }
  std::vector<Element> generators() const override {
    std::vector<Element> gens;
    for (std::int64_t i = 0; i < d_; ++i) {
      for (std::int64_t s : {1, -1}) {
        Element e = identity();
        e.word[i] = s;
        gens.push_back(std::move(e));
      }
    }
    return gens;
  }
  std::int64_t word_length(const Element& g) const override {
    std::int64_t n = 0;
    for (auto v : g.word) n += std::llabs(v);
    return n;
  }
  std::vector<Element> elements_up_to(std::int64_t radius) const override {
    std::vector<Element> out;
    Element cur = identity();
    fill(0, radius, cur, out);
    return out;
  }
  std::uint64_t predicted_ball_size(std::int64_t radius) const override {
    // sum_k 2^k C(d,k) C(R,k)
    std::uint64_t total = 0;
    for (std::int64_t k = 0; k <= std::min(d_, radius); ++k) {
      std::uint64_t term = sat_mul(binomial(d_, k), binomial(radius, k));
      for (std::int64_t i = 0; i < k; ++i) term = sat_mul(term, 2);
      total = sat_add(total, term);
    }
    return total;
  }
  std::string format(const Element& g) const override {
    std::string s = "(";
    for (std::size_t i = 0; i < g.word.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(g.word[i]);
    }
    return s + ")";
  }
  Element parse(std::string_view text) const override {
    text = trim(text);
    if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
      throw DomainError("malformed Z^d element '" + std::string(text) + "'");
    }
    Element e;
    for (auto part : split(text.substr(1, text.size() - 2), ',')) {
      e.word.push_back(parse_int(trim(part), "Z^d coordinate"));
    }
    validate(e);
    return e;
  }
  void validate(const Element& g) const override {
    if (static_cast<std::int64_t>(g.word.size()) != d_) {
      throw DomainError("Z^" + std::to_string(d_) + " element has " +
                        std::to_string(g.word.size()) + " coordinates");
    }
  }

 private:
  void fill(std::int64_t axis, std::int64_t budget, Element& cur, std::vector<Element>& out) const {
    if (axis == d_) {
      out.push_back(cur);
      return;
    }
    for (std::int64_t v = -budget; v <= budget; ++v) {
      cur.word[axis] = v;
      fill(axis + 1, budget - std::llabs(v), cur, out);
    }
    cur.word[axis] = 0;
  }

  std::int64_t d_;
};

// ---------------------------------------------------------------------------
// Free group F_k; letters are +-(i+1), normal form is the reduced word.

class FreeGroup final : public GroupModel {
 public:
  explicit FreeGroup(std::int64_t k) : k_(k) {}

  std::string spec() const override { return "Free:" + std::to_string(k_); }
  Element identity() const override { return {}; }

  Element multiply(const Element& g, const Element& h) const override {
    Element out = g;
    for (auto letter : h.word) {
      if (!out.word.empty() && out.word.back() == -letter) {
        out.word.pop_back();
      } else {
        out.word.push_back(letter);
      }
    }
    return out;
  }
  Element invert(const Element& g) const override {
    Element out;
    out.word.reserve(g.word.size());
    for (auto it = g.word.rbegin(); it != g.word.rend(); ++it) out.word.push_back(-*it);
    return out;
  }
  std::vector<Element> generators() const override {
    std::vector<Element> gens;
    for (std::int64_t i = 1; i <= k_; ++i) {
      gens.push_back({{i}});
      gens.push_back({{-i}});
    }
    return gens;
  }
  std::int64_t word_length(const Element& g) const override {
    return static_cast<std::int64_t>(g.word.size());
  }
  std::vector<Element> elements_up_to(std::int64_t radius) const override {
    std::vector<Element> out;
    Element cur;
    extend(radius, cur, out);
    return out;
  }
  std::uint64_t predicted_ball_size(std::int64_t radius) const override {
    std::uint64_t total = 1;
    std::uint64_t shell = static_cast<std::uint64_t>(2 * k_);
    for (std::int64_t l = 1; l <= radius; ++l) {
      total = sat_add(total, shell);
      shell = sat_mul(shell, static_cast<std::uint64_t>(2 * k_ - 1));
    }
    return total;
  }
  std::string format(const Element& g) const override {
    if (g.word.empty()) return "e";
    std::string s;
    for (std::size_t i = 0; i < g.word.size(); ++i) {
      if (i) s += ' ';
      s += static_cast<char>('a' + std::llabs(g.word[i]) - 1);
      if (g.word[i] < 0) s += "^-1";
    }
    return s;
  }
  Element parse(std::string_view text) const override {
    text = trim(text);
    Element e;
    if (text == "e") return e;
    for (auto tok : split(text, ' ')) {
      if (tok.empty()) continue;
      const char c = tok[0];
      std::int64_t letter = c - 'a' + 1;
      if (letter < 1 || letter > k_) {
        throw DomainError("unknown free generator in '" + std::string(text) + "'");
      }
      if (tok.size() > 1) {
        const auto exp = tok.substr(1);
        if (exp == "^-1") {
          letter = -letter;
        } else if (exp != "^1") {
          throw DomainError("malformed free-group token '" + std::string(tok) + "'");
        }
      }
      e.word.push_back(letter);
    }
    validate(e);
    return e;
  }
  void validate(const Element& g) const override {
    for (std::size_t i = 0; i < g.word.size(); ++i) {
      const auto l = g.word[i];
      if (l == 0 || std::llabs(l) > k_) throw DomainError("free-group letter out of range");
      if (i > 0 && g.word[i - 1] == -l) throw DomainError("free-group word is not reduced");
    }
  }

 private:
  void extend(std::int64_t budget, Element& cur, std::vector<Element>& out) const {
    out.push_back(cur);
    if (budget == 0) return;
    for (std::int64_t i = 1; i <= k_; ++i) {
      for (std::int64_t letter : {i, -i}) {
        if (!cur.word.empty() && cur.word.back() == -letter) continue;
        cur.word.push_back(letter);
        extend(budget - 1, cur, out);
        cur.word.pop_back();
      }
    }
  }

  std::int64_t k_;
};

// ---------------------------------------------------------------------------
// Infinite dihedral group <t, r | r^2, r t r = t^-1>, normal form t^n r^eps,
// stored as {n, eps}. Generators t, t^-1, r.

class InfiniteDihedral final : public GroupModel {
 public:
  std::string spec() const override { return "DInfinity"; }
  Element identity() const override { return {{0, 0}}; }

  Element multiply(const Element& g, const Element& h) const override {
    // (t^a r^e)(t^b r^f) = t^(a + (-1)^e b) r^(e+f)
    const std::int64_t b = g.word[1] ? -h.word[0] : h.word[0];
    return {{g.word[0] + b, g.word[1] ^ h.word[1]}};
  }
  Element invert(const Element& g) const override {
    if (g.word[1]) return g;  // reflections are involutions
    return {{-g.word[0], 0}};
  }
  std::vector<Element> generators() const override { return {{{1, 0}}, {{-1, 0}}, {{0, 1}}}; }
  std::int64_t word_length(const Element& g) const override {
    return std::llabs(g.word[0]) + g.word[1];
  }
  std::vector<Element> elements_up_to(std::int64_t radius) const override {
    std::vector<Element> out;
    for (std::int64_t n = -radius; n <= radius; ++n) {
      out.push_back({{n, 0}});
      if (std::llabs(n) + 1 <= radius) out.push_back({{n, 1}});
    }
    return out;
  }
  std::uint64_t predicted_ball_size(std::int64_t radius) const override {
    return radius == 0 ? 1 : static_cast<std::uint64_t>(4 * radius);
  }
  std::string format(const Element& g) const override {
    const auto n = g.word[0];
    std::string s;
    if (n != 0) s = "t^" + std::to_string(n);
    if (g.word[1]) s += s.empty() ? "r" : " r";
    return s.empty() ? "e" : s;
  }
  Element parse(std::string_view text) const override {
    text = trim(text);
    if (text == "e") return identity();
    Element e = identity();
    bool seen_r = false;
    for (auto tok : split(text, ' ')) {
      if (tok.empty()) continue;
      if (seen_r) throw DomainError("malformed D-infinity normal form '" + std::string(text) + "'");
      if (tok == "r") {
        e.word[1] = 1;
        seen_r = true;
      } else if (tok == "t") {
        e.word[0] = 1;
      } else if (tok.size() > 2 && tok.substr(0, 2) == "t^") {
        e.word[0] = parse_int(tok.substr(2), "t exponent");
      } else {
        throw DomainError("malformed D-infinity normal form '" + std::string(text) + "'");
      }
    }
    return e;
  }
  void validate(const Element& g) const override {
    if (g.word.size() != 2 || (g.word[1] != 0 && g.word[1] != 1)) {
      throw DomainError("D-infinity normal form must be t^n r^eps with eps in {0,1}");
    }
  }
};

// ---------------------------------------------------------------------------
// Z/n with generators +-1.

class Cyclic final : public GroupModel {
 public:
  explicit Cyclic(std::int64_t n) : n_(n) {}

  std::string spec() const override { return "Cyclic:" + std::to_string(n_); }
  Element identity() const override { return {{0}}; }
  Element multiply(const Element& g, const Element& h) const override {
    return {{(g.word[0] + h.word[0]) % n_}};
  }
  Element invert(const Element& g) const override { return {{(n_ - g.word[0]) % n_}}; }
  std::vector<Element> generators() const override {
    if (n_ == 1) return {};
    if (n_ == 2) return {{{1}}};
    return {{{1}}, {{n_ - 1}}};
  }
  std::int64_t word_length(const Element& g) const override {
    return std::min(g.word[0], n_ - g.word[0]);
  }
  std::vector<Element> elements_up_to(std::int64_t radius) const override {
    std::vector<Element> out;
    for (std::int64_t k = 0; k < n_; ++k) {
      if (std::min(k, n_ - k) <= radius) out.push_back({{k}});
    }
    return out;
  }
  std::uint64_t predicted_ball_size(std::int64_t radius) const override {
    return static_cast<std::uint64_t>(std::min<std::int64_t>(n_, 2 * radius + 1));
  }
  std::string format(const Element& g) const override {
    return "[" + std::to_string(g.word[0]) + "]";
  }
  Element parse(std::string_view text) const override {
    text = trim(text);
    if (text.size() < 3 || text.front() != '[' || text.back() != ']') {
      throw DomainError("malformed cyclic element '" + std::string(text) + "'");
    }
    Element e{{parse_int(text.substr(1, text.size() - 2), "cyclic residue")}};
    validate(e);
    return e;
  }
  void validate(const Element& g) const override {
    if (g.word.size() != 1 || g.word[0] < 0 || g.word[0] >= n_) {
      throw DomainError("cyclic residue out of range for " + spec());
    }
  }

 private:
  std::int64_t n_;
};

// ---------------------------------------------------------------------------
// Sym(n) in one-line notation (0-based images); generators are the adjacent
// transpositions, so word length is the inversion count. (gh)(i) = g(h(i)).

class Symmetric final : public GroupModel {
 public:
  explicit Symmetric(std::int64_t n) : n_(n) {}

  std::string spec() const override { return "Symmetric:" + std::to_string(n_); }
  Element identity() const override {
    Element e{std::vector<std::int64_t>(n_)};
    std::iota(e.word.begin(), e.word.end(), 0);
    return e;
  }
  Element multiply(const Element& g, const Element& h) const override {
    Element out{std::vector<std::int64_t>(n_)};
    for (std::int64_t i = 0; i < n_; ++i) out.word[i] = g.word[h.word[i]];
    return out;
  }
  Element invert(const Element& g) const override {
    Element out{std::vector<std::int64_t>(n_)};
    for (std::int64_t i = 0; i < n_; ++i) out.word[g.word[i]] = i;
    return out;
  }
  std::vector<Element> generators() const override {
    std::vector<Element> gens;
    for (std::int64_t i = 0; i + 1 < n_; ++i) {
      Element s = identity();
      std::swap(s.word[i], s.word[i + 1]);
      gens.push_back(std::move(s));
    }
    return gens;
  }
  std::int64_t word_length(const Element& g) const override {
    std::int64_t inv = 0;
    for (std::int64_t i = 0; i < n_; ++i) {
      for (std::int64_t j = i + 1; j < n_; ++j) inv += g.word[i] > g.word[j] ? 1 : 0;
    }
    return inv;
  }
  std::vector<Element> elements_up_to(std::int64_t radius) const override {
    std::vector<Element> out;
    Element p = identity();
    do {
      if (word_length(p) <= radius) out.push_back(p);
    } while (std::next_permutation(p.word.begin(), p.word.end()));
    return out;
  }
  std::uint64_t predicted_ball_size(std::int64_t radius) const override {
    // Mahonian numbers: permutations of n with at most R inversions.
    std::vector<std::uint64_t> row{1};
    for (std::int64_t m = 1; m <= n_; ++m) {
      std::vector<std::uint64_t> next(row.size() + static_cast<std::size_t>(m - 1), 0);
      for (std::size_t k = 0; k < row.size(); ++k) {
        for (std::int64_t j = 0; j < m; ++j) next[k + j] = sat_add(next[k + j], row[k]);
      }
      row = std::move(next);
    }
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < row.size() && static_cast<std::int64_t>(k) <= radius; ++k) {
      total = sat_add(total, row[k]);
    }
    return total;
  }
  std::string format(const Element& g) const override {
    std::string s = "[";
    for (std::size_t i = 0; i < g.word.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(g.word[i]);
    }
    return s + "]";
  }
  Element parse(std::string_view text) const override {
    text = trim(text);
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
      throw DomainError("malformed permutation '" + std::string(text) + "'");
    }
    Element e;
    for (auto part : split(text.substr(1, text.size() - 2), ',')) {
      e.word.push_back(parse_int(trim(part), "permutation image"));
    }
    validate(e);
    return e;
  }
  void validate(const Element& g) const override {
    if (static_cast<std::int64_t>(g.word.size()) != n_) {
      throw DomainError("permutation has wrong degree for " + spec());
    }
    std::vector<bool> seen(n_, false);
    for (auto v : g.word) {
      if (v < 0 || v >= n_ || seen[v]) throw DomainError("not a permutation of 0.." + std::to_string(n_ - 1));
      seen[v] = true;
    }
  }

 private:
  std::int64_t n_;
};

std::int64_t parse_family_parameter(std::string_view spec, std::string_view prefix,
                                    std::int64_t lo, std::int64_t hi) {
  const auto v = parse_int(spec.substr(prefix.size()), "group parameter");
  if (v < lo || v > hi) {
    throw ConfigError("group parameter out of range [" + std::to_string(lo) + "," +
                      std::to_string(hi) + "] in '" + std::string(spec) + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> GroupModel::generator_names() const {
  std::vector<std::string> names;
  for (const auto& g : generators()) names.push_back(format(g));
  return names;
}

GroupPtr make_group(std::string_view spec) {
  try {
    if (spec == "Z") return std::make_shared<FreeAbelian>(1);
    if (spec == "DInfinity") return std::make_shared<InfiniteDihedral>();
    if (spec.starts_with("Zd:")) return std::make_shared<FreeAbelian>(parse_family_parameter(spec, "Zd:", 1, 16));
    if (spec.starts_with("Free:")) return std::make_shared<FreeGroup>(parse_family_parameter(spec, "Free:", 1, 26));
    if (spec.starts_with("Cyclic:")) return std::make_shared<Cyclic>(parse_family_parameter(spec, "Cyclic:", 1, 1'000'000));
    if (spec.starts_with("Symmetric:")) return std::make_shared<Symmetric>(parse_family_parameter(spec, "Symmetric:", 1, 9));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown group '" + std::string(spec) +
                    "' (expected Zd:<d>, Free:<k>, DInfinity, Cyclic:<n>, Symmetric:<n>)");
}

bool shortlex_less(const GroupModel& group, const Element& a, const Element& b) {
  const auto la = group.word_length(a);
  const auto lb = group.word_length(b);
  if (la != lb) return la < lb;
  return a < b;
}

IndexedBall::IndexedBall(GroupBall ball) : ball_(std::move(ball)) {
  index_.reserve(ball_.elements.size());
  for (std::size_t i = 0; i < ball_.elements.size(); ++i) index_.emplace(ball_.elements[i], i);
}

std::optional<std::size_t> IndexedBall::find(const Element& g) const {
  const auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GroupBall enumerate_ball(GroupPtr group, std::int64_t radius, std::uint64_t cap) {
  if (radius < 0) throw DomainError("enumerate_ball: negative radius");
  const auto predicted = group->predicted_ball_size(radius);
  if (predicted > cap) {
    throw ResourceError("ball of radius " + std::to_string(radius) + " in " + group->spec() +
                        " has " + std::to_string(predicted) + " elements, above the cap of " +
                        std::to_string(cap) + " (raise --max-ball)");
  }
  auto elements = group->elements_up_to(radius);
  std::sort(elements.begin(), elements.end(),
            [&](const Element& a, const Element& b) { return shortlex_less(*group, a, b); });
  return {std::move(group), radius, std::move(elements)};
}

MetricWindow group_window(const GroupPtr& group, std::int64_t radius, std::uint64_t cap) {
  const auto b = enumerate_ball(group, radius, cap);
  const std::size_t n = b.elements.size();
  std::vector<std::string> points;
  std::vector<std::int64_t> depth;
  std::vector<Element> inverses;
  points.reserve(n);
  for (const auto& g : b.elements) {
    points.push_back(group->format(g));
    depth.push_back(radius - group->word_length(g));
    inverses.push_back(group->invert(g));
  }
  std::vector<std::int64_t> d(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[i * n + j] = d[j * n + i] = group->word_length(group->multiply(inverses[i], b.elements[j]));
    }
  }
  return MetricWindow("ball(" + group->spec() + "," + std::to_string(radius) + ")",
                      std::move(points), std::move(d), std::move(depth));
}

std::int64_t word_length_of(const GroupModel& group, const Element& g) {
  group.validate(g);
  return group.word_length(g);
}

}  // namespace coarse
