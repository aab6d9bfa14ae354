#include "bibd/design.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace bibd {

DesignParams derive_parameters(int v, int k, int lambda) {
  if (k < 2 || v <= k || lambda < 1) {
    throw DesignError(DesignError::Kind::InvalidRange,
                      "need v > k >= 2 and lambda >= 1, got (" + std::to_string(v) + "," + std::to_string(k) + "," +
                          std::to_string(lambda) + ")");
  }
  const std::int64_t pair_cover = static_cast<std::int64_t>(lambda) * (v - 1);
  if (pair_cover % (k - 1) != 0) {
    throw DesignError(DesignError::Kind::NonIntegerParameter,
                      "r = " + std::to_string(pair_cover) + "/" + std::to_string(k - 1) + " is not an integer");
  }
  const std::int64_t r = pair_cover / (k - 1);
  if ((v * r) % k != 0) {
    throw DesignError(DesignError::Kind::NonIntegerParameter,
                      "b = " + std::to_string(v * r) + "/" + std::to_string(k) + " is not an integer");
  }
  return {v, k, lambda, static_cast<int>(r), static_cast<int>(v * r / k)};
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::ParamIdentity: return "param-identity";
    case ViolationKind::InvalidRange: return "invalid-range";
    case ViolationKind::BlockSize: return "block-size";
    case ViolationKind::DuplicateBlock: return "duplicate-block";
    case ViolationKind::Degree: return "degree";
    case ViolationKind::CoDegree: return "co-degree";
    case ViolationKind::IndexRange: return "index-range";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [kind](const Violation& x) { return x.kind == kind; });
}

namespace {

std::string block_text(const Block& block) {
  std::string out = "{";
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(block[i]);
  }
  return out + "}";
}

}  // namespace

void canonicalize(RawDesign& raw) {
  for (auto& block : raw.blocks) std::sort(block.begin(), block.end());
  std::sort(raw.blocks.begin(), raw.blocks.end());
}

std::vector<int> point_degrees(int v, const std::vector<Block>& blocks) {
  std::vector<int> deg(static_cast<std::size_t>(std::max(v, 0)), 0);
  for (const auto& block : blocks)
    for (Point p : block)
      if (p >= 0 && p < v) ++deg[p];
  return deg;
}

std::vector<int> pair_codegrees(int v, const std::vector<Block>& blocks) {
  const auto n = static_cast<std::size_t>(std::max(v, 0));
  std::vector<int> co(n * n, 0);
  for (const auto& block : blocks) {
    for (std::size_t a = 0; a < block.size(); ++a) {
      for (std::size_t c = a + 1; c < block.size(); ++c) {
        const Point i = block[a], j = block[c];
        if (i < 0 || j < 0 || i >= v || j >= v || i == j) continue;
        ++co[i * n + j];
        ++co[j * n + i];
      }
    }
  }
  return co;
}

bool is_connected(int v, const std::vector<Block>& blocks) {
  if (v <= 1) return true;
  std::vector<int> parent(v);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& block : blocks)
    for (std::size_t i = 1; i < block.size(); ++i) parent[find(block[i])] = find(block[0]);
  const int root = find(0);
  for (int i = 1; i < v; ++i)
    if (find(i) != root) return false;
  return true;
}

ValidationReport validate(const RawDesign& candidate) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::string witness) { report.violations.push_back({kind, std::move(witness)}); };

  const int v = candidate.v, k = candidate.k, lambda = candidate.lambda;
  if (k < 2 || v <= k || lambda < 1) {
    add(ViolationKind::InvalidRange, "(v,k,lambda)=(" + std::to_string(v) + "," + std::to_string(k) + "," + std::to_string(lambda) +
                                         ");need:v>k>=2,lambda>=1");
    return report;
  }

  // r and b as the identities demand; non-integral values are themselves violations.
  const std::int64_t pair_cover = static_cast<std::int64_t>(lambda) * (v - 1);
  std::int64_t r = -1;
  if (pair_cover % (k - 1) != 0) {
    add(ViolationKind::ParamIdentity, "lambda(v-1)=" + std::to_string(pair_cover) + ";not-divisible-by:k-1=" + std::to_string(k - 1));
  } else {
    r = pair_cover / (k - 1);
    if ((v * r) % k != 0) add(ViolationKind::ParamIdentity, "v*r=" + std::to_string(v * r) + ";not-divisible-by:k=" + std::to_string(k));
  }
  const auto b = static_cast<std::int64_t>(candidate.blocks.size());
  if (r >= 0 && b * k != v * r) {
    add(ViolationKind::ParamIdentity,
        "b=" + std::to_string(b) + ";b*k=" + std::to_string(b * k) + ";v*r=" + std::to_string(v * r));
  }

  std::set<Block> seen;
  for (std::size_t idx = 0; idx < candidate.blocks.size(); ++idx) {
    Block block = candidate.blocks[idx];
    std::sort(block.begin(), block.end());
    for (Point p : block) {
      if (p < 0 || p >= v) {
        add(ViolationKind::IndexRange, "block#" + std::to_string(idx) + ";point=" + std::to_string(p));
      }
    }
    const bool distinct = std::adjacent_find(block.begin(), block.end()) == block.end();
    if (static_cast<int>(block.size()) != k || !distinct) {
      add(ViolationKind::BlockSize, "block#" + std::to_string(idx) + block_text(block) + ";distinct=" +
                                        std::to_string(std::set<Point>(block.begin(), block.end()).size()));
    }
    if (!seen.insert(block).second) {
      add(ViolationKind::DuplicateBlock, "block#" + std::to_string(idx) + block_text(block));
    }
  }

  if (r >= 0) {
    const auto deg = point_degrees(v, candidate.blocks);
    for (int i = 0; i < v; ++i) {
      if (deg[i] != r) {
        add(ViolationKind::Degree,
            "point=" + std::to_string(i) + ";degree=" + std::to_string(deg[i]) + ";r=" + std::to_string(r));
      }
    }
  }
  const auto co = pair_codegrees(v, candidate.blocks);
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      const int d = co[i * v + j];
      if (d != lambda) {
        add(ViolationKind::CoDegree, "pair=(" + std::to_string(i) + "," + std::to_string(j) + ");co-degree=" + std::to_string(d) +
                                         ";lambda=" + std::to_string(lambda));
      }
    }
  }
  return report;
}

Design Design::from_raw(RawDesign raw) {
  canonicalize(raw);
  const auto report = validate(raw);
  if (!report.valid()) {
    std::string msg = "not a valid BIBD:";
    for (const auto& x : report.violations) msg += "\n  " + std::string(to_string(x.kind)) + ": " + x.witness;
    throw std::invalid_argument(msg);
  }
  return Design(derive_parameters(raw.v, raw.k, raw.lambda), std::move(raw.blocks));
}

// ---------------------------------------------------------------------------
// generation

namespace {

void k_subsets(int v, int k, int start, Block& cur, std::vector<Block>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int p = start; p <= v - (k - static_cast<int>(cur.size())); ++p) {
    cur.push_back(p);
    k_subsets(v, k, p + 1, cur, out);
    cur.pop_back();
  }
}

class BlockSearch {
 public:
  BlockSearch(const DesignParams& params, std::int64_t budget, std::uint64_t seed)
      : p_(params), budget_(budget), degree_(params.v, 0), codegree_(params.v * params.v, 0) {
    std::vector<Block> all;
    Block cur;
    k_subsets(p_.v, p_.k, 0, cur, all);
    groups_.resize(p_.v);
    for (auto& block : all) groups_[block.front()].push_back(std::move(block));
    if (seed != 0) {
      std::mt19937_64 rng(seed);
      for (auto& group : groups_) {
        // Fisher-Yates with raw engine output keeps the order identical across standard libraries.
        for (std::size_t i = group.size(); i > 1; --i) std::swap(group[i - 1], group[rng() % i]);
      }
    }
  }

  GenerateResult run() {
    GenerateResult result;
    const bool found = extend(0, 0);
    result.nodes = nodes_;
    if (found) {
      result.status = SearchStatus::Found;
      result.blocks = chosen_;
    } else {
      result.status = out_of_budget_ ? SearchStatus::BudgetExhausted : SearchStatus::SpaceExhausted;
    }
    return result;
  }

 private:
  bool fits(const Block& block) const {
    for (std::size_t a = 0; a < block.size(); ++a) {
      if (degree_[block[a]] >= p_.r) return false;
      for (std::size_t c = a + 1; c < block.size(); ++c)
        if (codegree_[block[a] * p_.v + block[c]] >= p_.lambda) return false;
    }
    return true;
  }

  void place(const Block& block, int delta) {
    for (std::size_t a = 0; a < block.size(); ++a) {
      degree_[block[a]] += delta;
      for (std::size_t c = a + 1; c < block.size(); ++c) {
        codegree_[block[a] * p_.v + block[c]] += delta;
        codegree_[block[c] * p_.v + block[a]] += delta;
      }
    }
  }

  // `point` is a lower bound for the first deficient point; `from` is the first
  // admissible candidate index within that point's group.
  bool extend(int point, std::size_t from) {
    while (point < p_.v && degree_[point] == p_.r) {
      ++point;
      from = 0;
    }
    if (point == p_.v) return static_cast<int>(chosen_.size()) == p_.b;
    const auto& group = groups_[point];
    for (std::size_t idx = from; idx < group.size(); ++idx) {
      const Block& block = group[idx];
      if (!fits(block)) continue;
      if (nodes_ >= budget_) {
        out_of_budget_ = true;
        return false;
      }
      ++nodes_;
      place(block, +1);
      chosen_.push_back(block);
      if (extend(point, idx + 1)) return true;
      chosen_.pop_back();
      place(block, -1);
      if (out_of_budget_) return false;
    }
    return false;
  }

  DesignParams p_;
  std::int64_t budget_;
  std::int64_t nodes_ = 0;
  bool out_of_budget_ = false;
  std::vector<std::vector<Block>> groups_;
  std::vector<int> degree_;
  std::vector<int> codegree_;
  std::vector<Block> chosen_;
};

}  // namespace

GenerateResult generate(const DesignParams& params, std::int64_t budget, std::uint64_t seed) {
  const auto checked = derive_parameters(params.v, params.k, params.lambda);
  auto result = BlockSearch(checked, budget, seed).run();
  std::sort(result.blocks.begin(), result.blocks.end());
  return result;
}

Design generate_design(const DesignParams& params, std::int64_t budget, std::uint64_t seed) {
  auto result = generate(params, budget, seed);
  switch (result.status) {
    case SearchStatus::Found:
      return Design::from_raw({params.v, params.k, params.lambda, std::move(result.blocks)});
    case SearchStatus::BudgetExhausted:
      throw std::runtime_error("budget exhausted after " + std::to_string(result.nodes) + " nodes");
    case SearchStatus::SpaceExhausted:
      break;
  }
  throw std::runtime_error("search space exhausted: no simple design with these parameters");
}

// ---------------------------------------------------------------------------
// catalog

namespace {

std::vector<Block> all_pairs(int v) {
  std::vector<Block> out;
  for (int i = 0; i < v; ++i)
    for (int j = i + 1; j < v; ++j) out.push_back({i, j});
  return out;
}

const std::vector<Block> kFanoLines = {{0, 1, 3}, {1, 2, 4}, {2, 3, 5}, {3, 4, 6}, {0, 4, 5}, {1, 5, 6}, {0, 2, 6}};

std::vector<Block> affine_plane_3() {
  // Points (x, y) of Z_3^2 numbered 3x + y; lines y = m x + c and x = c.
  std::vector<Block> out;
  for (int m = 0; m < 3; ++m)
    for (int c = 0; c < 3; ++c) {
      Block line;
      for (int x = 0; x < 3; ++x) line.push_back(3 * x + (m * x + c) % 3);
      out.push_back(line);
    }
  for (int c = 0; c < 3; ++c) out.push_back({3 * c, 3 * c + 1, 3 * c + 2});
  return out;
}

std::vector<Block> fano_complements() {
  std::vector<Block> out;
  for (const auto& line : kFanoLines) {
    Block comp;
    for (int p = 0; p < 7; ++p)
      if (std::find(line.begin(), line.end(), p) == line.end()) comp.push_back(p);
    out.push_back(comp);
  }
  return out;
}

const std::vector<Block> kSixPointTwoDesign = {{0, 1, 2}, {0, 1, 3}, {0, 2, 4}, {0, 3, 5}, {0, 4, 5},
                                               {1, 2, 5}, {1, 3, 4}, {1, 4, 5}, {2, 3, 4}, {2, 3, 5}};

struct CatalogEntry {
  std::string name;
  Design design;
};

const std::vector<CatalogEntry>& entries() {
  static const std::vector<CatalogEntry> table = [] {
    std::vector<CatalogEntry> t;
    t.push_back({"fano-7-3-1", Design::from_raw({7, 3, 1, kFanoLines})});
    t.push_back({"pairs-4-2-1", Design::from_raw({4, 2, 1, all_pairs(4)})});
    t.push_back({"pairs-5-2-1", Design::from_raw({5, 2, 1, all_pairs(5)})});
    t.push_back({"affine-9-3-1", Design::from_raw({9, 3, 1, affine_plane_3()})});
    t.push_back({"complement-fano-7-4-2", Design::from_raw({7, 4, 2, fano_complements()})});
    t.push_back({"biplane-6-3-2", Design::from_raw({6, 3, 2, kSixPointTwoDesign})});
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.push_back(e.name);
    return out;
  }();
  return names;
}

const Design& catalog(std::string_view name) {
  for (const auto& e : entries())
    if (e.name == name) return e.design;
  throw DesignError(DesignError::Kind::UnknownName, "unknown catalog design '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// text format

namespace {

std::vector<long long> parse_ints(std::string_view line, int line_no) {
  std::vector<long long> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(tok, &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      throw DesignError(DesignError::Kind::SyntaxError,
                        "line " + std::to_string(line_no) + ": expected an integer, got '" + tok + "'");
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace

RawDesign parse_design(std::string_view text) {
  RawDesign raw;
  bool have_header = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    const auto values = parse_ints(line, line_no);
    if (!have_header) {
      if (values.size() != 3) {
        throw DesignError(DesignError::Kind::SyntaxError,
                          "line " + std::to_string(line_no) + ": header must be 'v k lambda'");
      }
      raw.v = static_cast<int>(values[0]);
      raw.k = static_cast<int>(values[1]);
      raw.lambda = static_cast<int>(values[2]);
      have_header = true;
      continue;
    }
    Block block;
    for (long long p : values) {
      if (p < 0 || p >= raw.v) {
        throw DesignError(DesignError::Kind::IndexOutOfRange, "line " + std::to_string(line_no) + ": point " +
                                                                  std::to_string(p) + " outside [0, " +
                                                                  std::to_string(raw.v) + ")");
      }
      block.push_back(static_cast<Point>(p));
    }
    raw.blocks.push_back(std::move(block));
  }
  if (!have_header) throw DesignError(DesignError::Kind::SyntaxError, "line 1: missing 'v k lambda' header");
  canonicalize(raw);
  return raw;
}

std::string serialize_design(const Design& design) {
  std::ostringstream out;
  out << design.v() << ' ' << design.k() << ' ' << design.lambda() << '\n';
  for (const auto& block : design.blocks()) {
    for (std::size_t i = 0; i < block.size(); ++i) out << (i ? " " : "") << block[i];
    out << '\n';
  }
  return out.str();
}

RawDesign read_design_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_design(buf.str());
}

}  // namespace bibd
