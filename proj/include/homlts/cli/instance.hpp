#pragma once

// Line-oriented instance files.
//
//   # comment
//   [instance]            name, description, scalar_field = rational, dim
//   [bracket]             bracket i j k = 2 e_1 - 1/2 e_3
//   [alpha]               row i = a_1 .. a_n
//   [group]               elements = labels..., identity = label, cayley x = labels...
//   [action]              <label> = row; row; ...
//   [representation]      dim = m, twist = rows, theta i j = rows
//   [representation-action]  <label> = rows
//   [fiber]               dim = m, row p = ..., action <label> = rows
//   [extension NAME]      bracket i j k = ..., row i = ..., incl/proj/section = rows,
//                         action <label> = rows
//   [cochain NAME]        degree = d, coefficients = adjoint|representation|fiber,
//                         f i_1 .. i_d = 3 v_1 (e_ for adjoint)
//   [deformation NAME]    order = N, mu_r i j k = ...
//   [isomorphism NAME]    order = M, source = NAME, target = NAME, psi_r = rows
//
// Basis labels are 1-based in files and 0-based in memory.

#include "homlts/deformations.hpp"
#include "homlts/extensions.hpp"

#include <map>
#include <regex>
#include <set>

namespace homlts::cli {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

struct NamedCochain {
  std::string name;
  std::string coefficients;  // adjoint | representation | fiber
  Cochain f;
};

struct NamedExtension {
  std::string name;
  CentralExtension ext;
};

struct NamedDeformation {
  std::string name;
  Deformation d;
};

struct NamedIsomorphism {
  std::string name;
  std::string source, target;
  FormalIsomorphism psi;
};

struct InstanceDocument {
  std::string name;
  std::string description;
  std::string fingerprint;  // content hash of the file text
  HomLts lts;
  std::optional<FiniteGroup> group;
  std::optional<GroupAction> action;
  std::optional<Representation> rep;
  std::optional<GroupAction> rep_action;
  std::optional<Fiber> fiber;
  std::vector<NamedExtension> extensions;
  std::vector<NamedCochain> cochains;
  std::vector<NamedDeformation> deformations;
  std::vector<NamedIsomorphism> isomorphisms;

  std::size_t dim() const { return lts.dim(); }
};

namespace detail {

struct SrcLine {
  std::size_t line = 0;
  std::size_t col = 1;  // column of the first character of text
  std::string text;
};

struct RawSection {
  std::string kind, name;
  std::size_t line = 0;
  std::vector<SrcLine> lines;
};

inline std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    if (lead) *lead = s.size();
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  if (lead) *lead = b;
  return s.substr(b, e - b + 1);
}

inline std::vector<std::pair<std::string, std::size_t>> split_ws(const std::string& s, std::size_t col0) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    out.push_back({s.substr(b, i - b), col0 + b});
  }
  return out;
}

/// One "key = value" line split at the first '='.
struct Assignment {
  std::string key, value;
  std::size_t line, key_col, value_col;
};

inline Assignment split_assignment(const SrcLine& l, const std::string& section) {
  const auto eq = l.text.find('=');
  if (eq == std::string::npos) throw ParseError(l.line, l.col, "expected 'key = value' in [" + section + "]");
  std::size_t klead = 0, vlead = 0;
  const std::string key = trim(l.text.substr(0, eq), &klead);
  const std::string rest = l.text.substr(eq + 1);
  const std::string value = trim(rest, &vlead);
  if (key.empty()) throw ParseError(l.line, l.col, "missing key before '='");
  return {key, value, l.line, l.col + klead, l.col + eq + 1 + vlead};
}

inline Scalar parse_rational(const std::string& tok, std::size_t line, std::size_t col) {
  static const std::regex re(R"(^[+-]?[0-9]+(/[0-9]+)?$)");
  if (!std::regex_match(tok, re)) throw ParseError(line, col, "malformed rational '" + tok + "'");
  const auto slash = tok.find('/');
  if (slash != std::string::npos && std::all_of(tok.begin() + static_cast<std::ptrdiff_t>(slash) + 1, tok.end(),
                                                 [](char c) { return c == '0'; }))
    throw ParseError(line, col, "zero denominator in '" + tok + "'");
  std::string t = tok[0] == '+' ? tok.substr(1) : tok;
  Scalar s(t, 10);
  s.canonicalize();
  return s;
}

inline std::size_t parse_count(const std::string& tok, std::size_t line, std::size_t col, const std::string& what) {
  static const std::regex re(R"(^[0-9]+$)");
  if (!std::regex_match(tok, re) || tok.size() > 9) throw ParseError(line, col, "expected a count for " + what + ", got '" + tok + "'");
  return static_cast<std::size_t>(std::stoul(tok));
}

/// 1-based label -> 0-based index with a range check.
inline std::size_t parse_index(const std::string& tok, std::size_t bound, std::size_t line, std::size_t col,
                               const std::string& where) {
  const std::size_t v = parse_count(tok, line, col, "an index in " + where);
  if (v < 1 || v > bound)
    throw ParseError(line, col, where + ": index " + tok + " out of range 1.." + std::to_string(bound));
  return v - 1;
}

/// "2 e_1 - 1/2 e_3", "-e_2", "0"
inline Vector parse_combination(const std::string& text, std::size_t col0, std::size_t line, char letter,
                                std::size_t dim, const std::string& where) {
  Vector v(dim, Scalar(0));
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  skip();
  if (i == text.size()) throw ParseError(line, col0, where + ": empty right-hand side");
  if (trim(text) == "0") return v;
  bool first = true;
  while (true) {
    skip();
    if (i == text.size()) break;
    Scalar sign = 1;
    bool had_sign = false;
    while (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      if (text[i] == '-') sign = -sign;
      had_sign = true;
      ++i;
      skip();
    }
    if (!first && !had_sign) throw ParseError(line, col0 + i, where + ": expected '+' or '-' between terms");
    first = false;
    Scalar coef = 1;
    if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      const std::size_t b = i;
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '/')) ++i;
      coef = parse_rational(text.substr(b, i - b), line, col0 + b);
      skip();
      if (i < text.size() && text[i] == '*') {
        ++i;
        skip();
      }
    }
    if (i >= text.size() || text[i] != letter)
      throw ParseError(line, col0 + i, where + ": expected basis vector " + std::string(1, letter) + "_k");
    ++i;
    if (i < text.size() && text[i] == '_') ++i;
    const std::size_t b = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (b == i) throw ParseError(line, col0 + b, where + ": missing basis index");
    const std::size_t k = parse_index(text.substr(b, i - b), dim, line, col0 + b, where);
    v[k] += sign * coef;
  }
  return v;
}

inline Vector parse_row(const std::string& text, std::size_t col0, std::size_t line, std::size_t len,
                        const std::string& where) {
  const auto toks = split_ws(text, col0);
  if (toks.size() != len)
    throw ParseError(line, col0, where + ": expected " + std::to_string(len) + " entries, got " +
                                     std::to_string(toks.size()));
  Vector v;
  for (const auto& [t, c] : toks) v.push_back(parse_rational(t, line, c));
  return v;
}

/// "a b; c d" as a rows x cols matrix.
inline Matrix parse_matrix(const std::string& text, std::size_t col0, std::size_t line, std::size_t rows,
                           std::size_t cols, const std::string& where) {
  Matrix m(rows, cols);
  std::size_t start = 0, r = 0;
  while (true) {
    const auto semi = text.find(';', start);
    const std::string piece = text.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
    if (r >= rows) throw ParseError(line, col0 + start, where + ": more than " + std::to_string(rows) + " rows");
    const Vector row = parse_row(piece, col0 + start, line, cols, where + " row " + std::to_string(r + 1));
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    ++r;
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  if (r != rows) throw ParseError(line, col0, where + ": expected " + std::to_string(rows) + " rows, got " + std::to_string(r));
  return m;
}

/// Tracks "duplicate assignment" per section.
class SeenKeys {
 public:
  void mark(const std::string& key, std::size_t line, std::size_t col, const std::string& section) {
    if (!seen_.insert(key).second) throw ParseError(line, col, "[" + section + "] duplicate assignment for '" + key + "'");
  }
  bool has(const std::string& key) const { return seen_.contains(key); }

 private:
  std::set<std::string> seen_;
};

inline std::vector<RawSection> split_sections(const std::string& text) {
  std::vector<RawSection> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::size_t lead = 0;
    const std::string t = trim(raw, &lead);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(lineno, lead + 1, "unterminated section header");
      const auto toks = split_ws(t.substr(1, t.size() - 2), lead + 2);
      if (toks.empty() || toks.size() > 2) throw ParseError(lineno, lead + 1, "section header must be [kind] or [kind NAME]");
      out.push_back({toks[0].first, toks.size() == 2 ? toks[1].first : "", lineno, {}});
      continue;
    }
    if (out.empty()) throw ParseError(lineno, lead + 1, "content before the first section header");
    out.back().lines.push_back({lineno, lead + 1, t});
  }
  return out;
}

/// "bracket i j k = comb" over a space of dimension n.
inline void parse_bracket_line(const Assignment& a, std::size_t n, Vector& c, SeenKeys& seen,
                               const std::string& section) {
  const auto toks = split_ws(a.key, a.key_col);
  if (toks.size() != 4 || toks[0].first != "bracket")
    throw ParseError(a.line, a.key_col, "[" + section + "] expected 'bracket i j k = ...'");
  IndexTuple t(3);
  for (std::size_t s = 0; s < 3; ++s) t[s] = parse_index(toks[s + 1].first, n, a.line, toks[s + 1].second, "[" + section + "]");
  seen.mark("bracket " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1), a.line,
            a.key_col, section);
  const Vector v = parse_combination(a.value, a.value_col, a.line, 'e', n, "[" + section + "]");
  for (std::size_t l = 0; l < n; ++l) c[((t[0] * n + t[1]) * n + t[2]) * n + l] = v[l];
}

/// A twist given row by row must list every row.
inline void require_rows(const SeenKeys& seen, std::size_t n, std::size_t line, const std::string& section) {
  for (std::size_t i = 1; i <= n; ++i)
    if (!seen.has("row " + std::to_string(i))) throw ParseError(line, 1, "[" + section + "] missing row " + std::to_string(i));
}

inline void parse_alpha_row(const Assignment& a, std::size_t n, Matrix& m, SeenKeys& seen, const std::string& section) {
  const auto toks = split_ws(a.key, a.key_col);
  if (toks.size() != 2 || toks[0].first != "row")
    throw ParseError(a.line, a.key_col, "[" + section + "] expected 'row i = ...'");
  const std::size_t i = parse_index(toks[1].first, n, a.line, toks[1].second, "[" + section + "]");
  seen.mark("row " + std::to_string(i + 1), a.line, a.key_col, section);
  const Vector v = parse_row(a.value, a.value_col, a.line, n, "[" + section + "] row " + toks[1].first);
  for (std::size_t j = 0; j < n; ++j) m(i, j) = v[j];
}

inline std::size_t group_label(const FiniteGroup& g, const std::string& label, std::size_t line, std::size_t col,
                               const std::string& section) {
  const auto& ls = g.labels();
  const auto it = std::find(ls.begin(), ls.end(), label);
  if (it == ls.end()) throw ParseError(line, col, "[" + section + "] unknown group element '" + label + "'");
  return static_cast<std::size_t>(it - ls.begin());
}

/// Lines "<label> = rows" (optionally prefixed by "action"), one per element.
inline std::vector<Matrix> parse_action_lines(const std::vector<Assignment>& lines, const FiniteGroup& g,
                                              std::size_t dim, const std::string& section, std::size_t header_line,
                                              bool prefixed) {
  std::vector<std::optional<Matrix>> ms(g.order());
  for (const auto& a : lines) {
    const auto toks = split_ws(a.key, a.key_col);
    const std::size_t need = prefixed ? 2 : 1;
    if (toks.size() != need || (prefixed && toks[0].first != "action"))
      throw ParseError(a.line, a.key_col, "[" + section + "] expected '" + std::string(prefixed ? "action " : "") + "<element> = rows'");
    const auto& lab = toks.back();
    const std::size_t e = group_label(g, lab.first, a.line, lab.second, section);
    if (ms[e]) throw ParseError(a.line, a.key_col, "[" + section + "] duplicate assignment for element '" + lab.first + "'");
    ms[e] = parse_matrix(a.value, a.value_col, a.line, dim, dim, "[" + section + "] element " + lab.first);
  }
  std::vector<Matrix> out;
  for (std::size_t e = 0; e < g.order(); ++e) {
    if (!ms[e]) throw ParseError(header_line, 1, "[" + section + "] missing matrix for element '" + g.labels()[e] + "'");
    out.push_back(*ms[e]);
  }
  return out;
}

}  // namespace detail

inline InstanceDocument parse_instance(const std::string& text) {
  using namespace detail;
  const auto sections = split_sections(text);
  InstanceDocument doc;
  {
    ::homlts::detail::Fnv1a h;
    h.bytes(text);
    doc.fingerprint = h.hex();
  }

  std::map<std::string, const RawSection*> singles;
  std::set<std::string> named_seen;
  static const std::set<std::string> single_kinds = {"instance", "bracket", "alpha", "group", "action",
                                                     "representation", "representation-action", "fiber"};
  static const std::set<std::string> named_kinds = {"extension", "cochain", "deformation", "isomorphism"};
  for (const auto& s : sections) {
    if (single_kinds.contains(s.kind)) {
      if (!s.name.empty()) throw ParseError(s.line, 1, "section [" + s.kind + "] takes no name");
      if (!singles.emplace(s.kind, &s).second) throw ParseError(s.line, 1, "duplicate section [" + s.kind + "]");
    } else if (named_kinds.contains(s.kind)) {
      if (s.name.empty()) throw ParseError(s.line, 1, "section [" + s.kind + "] needs a name");
      if (!named_seen.insert(s.kind + " " + s.name).second)
        throw ParseError(s.line, 1, "duplicate section [" + s.kind + " " + s.name + "]");
    } else {
      throw ParseError(s.line, 1, "unknown section [" + s.kind + "]");
    }
  }
  auto assignments = [](const RawSection& s) {
    std::vector<Assignment> out;
    for (const auto& l : s.lines) out.push_back(split_assignment(l, s.kind));
    return out;
  };

  // [instance]
  if (!singles.contains("instance")) throw ParseError(1, 1, "missing [instance] section");
  std::size_t n = 0;
  {
    const RawSection& s = *singles["instance"];
    SeenKeys seen;
    bool have_dim = false;
    for (const auto& a : assignments(s)) {
      seen.mark(a.key, a.line, a.key_col, "instance");
      if (a.key == "name") doc.name = a.value;
      else if (a.key == "description") doc.description = a.value;
      else if (a.key == "scalar_field") {
        if (a.value != "rational") throw ParseError(a.line, a.value_col, "[instance] scalar_field must be 'rational'");
      } else if (a.key == "dim") {
        n = parse_count(a.value, a.line, a.value_col, "dim");
        have_dim = true;
      } else
        throw ParseError(a.line, a.key_col, "[instance] unknown key '" + a.key + "'");
    }
    if (!have_dim) throw ParseError(s.line, 1, "[instance] missing dim");
    if (n == 0) throw ParseError(s.line, 1, "[instance] dim must be positive");
  }

  Vector bracket(ipow(n, 4), Scalar(0));
  if (singles.contains("bracket")) {
    SeenKeys seen;
    for (const auto& a : assignments(*singles["bracket"])) parse_bracket_line(a, n, bracket, seen, "bracket");
  }
  Matrix alpha = Matrix::identity(n);
  if (singles.contains("alpha")) {
    SeenKeys seen;
    const auto as = assignments(*singles["alpha"]);
    if (!as.empty()) alpha = Matrix(n, n);
    for (const auto& a : as) parse_alpha_row(a, n, alpha, seen, "alpha");
    if (!as.empty()) require_rows(seen, n, singles["alpha"]->line, "alpha");
  }
  doc.lts = HomLts(n, std::move(bracket), std::move(alpha));

  // [group]
  if (singles.contains("group")) {
    const RawSection& s = *singles["group"];
    SeenKeys seen;
    std::vector<std::string> labels;
    std::optional<std::string> ident;
    std::size_t ident_line = s.line, ident_col = 1;
    std::vector<Assignment> rows;
    for (const auto& a : assignments(s)) {
      const auto toks = split_ws(a.key, a.key_col);
      if (a.key == "elements") {
        seen.mark(a.key, a.line, a.key_col, "group");
        for (const auto& [t, c] : split_ws(a.value, a.value_col)) {
          if (std::find(labels.begin(), labels.end(), t) != labels.end())
            throw ParseError(a.line, c, "[group] repeated element label '" + t + "'");
          labels.push_back(t);
        }
      } else if (a.key == "identity") {
        seen.mark(a.key, a.line, a.key_col, "group");
        ident = a.value;
        ident_line = a.line, ident_col = a.value_col;
      } else if (toks.size() == 2 && toks[0].first == "cayley") {
        rows.push_back(a);
      } else {
        throw ParseError(a.line, a.key_col, "[group] unknown key '" + a.key + "'");
      }
    }
    if (labels.empty()) throw ParseError(s.line, 1, "[group] missing elements");
    if (!ident) throw ParseError(s.line, 1, "[group] missing identity");
    const FiniteGroup proto(labels, std::vector<std::size_t>(labels.size() * labels.size(), 0), 0);
    const std::size_t id = group_label(proto, *ident, ident_line, ident_col, "group");
    const std::size_t k = labels.size();
    std::vector<std::size_t> table(k * k);
    std::vector<bool> have(k, false);
    for (const auto& a : rows) {
      const auto toks = split_ws(a.key, a.key_col);
      const std::size_t x = group_label(proto, toks[1].first, a.line, toks[1].second, "group");
      if (have[x]) throw ParseError(a.line, a.key_col, "[group] duplicate assignment for cayley row '" + toks[1].first + "'");
      have[x] = true;
      const auto vals = split_ws(a.value, a.value_col);
      if (vals.size() != k)
        throw ParseError(a.line, a.value_col, "[group] cayley row '" + toks[1].first + "' needs " + std::to_string(k) + " entries");
      for (std::size_t y = 0; y < k; ++y) table[x * k + y] = group_label(proto, vals[y].first, a.line, vals[y].second, "group");
    }
    for (std::size_t x = 0; x < k; ++x)
      if (!have[x]) throw ParseError(s.line, 1, "[group] missing cayley row '" + labels[x] + "'");
    doc.group = FiniteGroup(labels, std::move(table), id);
  }

  auto need_group = [&](const RawSection& s) -> const FiniteGroup& {
    if (!doc.group) throw ParseError(s.line, 1, "[" + s.kind + "] requires a [group] section");
    return *doc.group;
  };

  if (singles.contains("action")) {
    const RawSection& s = *singles["action"];
    doc.action = GroupAction(need_group(s), n, parse_action_lines(assignments(s), need_group(s), n, "action", s.line, false));
  } else if (doc.group) {
    throw ParseError(singles["group"]->line, 1, "[group] given without an [action] section");
  }

  if (singles.contains("representation")) {
    const RawSection& s = *singles["representation"];
    SeenKeys seen;
    const auto as = assignments(s);
    std::size_t m = 0;
    bool have_m = false;
    for (const auto& a : as)
      if (a.key == "dim") {
        seen.mark(a.key, a.line, a.key_col, "representation");
        m = parse_count(a.value, a.line, a.value_col, "dim");
        have_m = true;
      }
    if (!have_m || m == 0) throw ParseError(s.line, 1, "[representation] needs a positive dim");
    Matrix twist = Matrix::identity(m);
    Vector theta(n * n * m * m, Scalar(0));
    for (const auto& a : as) {
      if (a.key == "dim") continue;
      const auto toks = split_ws(a.key, a.key_col);
      if (a.key == "twist") {
        seen.mark(a.key, a.line, a.key_col, "representation");
        twist = parse_matrix(a.value, a.value_col, a.line, m, m, "[representation] twist");
      } else if (toks.size() == 3 && toks[0].first == "theta") {
        const std::size_t i = parse_index(toks[1].first, n, a.line, toks[1].second, "[representation]");
        const std::size_t j = parse_index(toks[2].first, n, a.line, toks[2].second, "[representation]");
        seen.mark("theta " + std::to_string(i + 1) + " " + std::to_string(j + 1), a.line, a.key_col, "representation");
        const Matrix t = parse_matrix(a.value, a.value_col, a.line, m, m, "[representation] theta");
        for (std::size_t p = 0; p < m; ++p)
          for (std::size_t q = 0; q < m; ++q) theta[((i * n + j) * m + p) * m + q] = t(p, q);
      } else {
        throw ParseError(a.line, a.key_col, "[representation] unknown key '" + a.key + "'");
      }
    }
    doc.rep = Representation(n, m, std::move(theta), std::move(twist));
    if (singles.contains("representation-action")) {
      const RawSection& ra = *singles["representation-action"];
      doc.rep_action = GroupAction(need_group(ra), m,
                                   parse_action_lines(assignments(ra), need_group(ra), m, "representation-action", ra.line, false));
    } else if (doc.group) {
      throw ParseError(s.line, 1, "[representation] with a group needs a [representation-action] section");
    }
  } else if (singles.contains("representation-action")) {
    throw ParseError(singles["representation-action"]->line, 1, "[representation-action] without [representation]");
  }

  if (singles.contains("fiber")) {
    const RawSection& s = *singles["fiber"];
    SeenKeys seen;
    const auto as = assignments(s);
    std::size_t m = 0;
    bool have_m = false;
    for (const auto& a : as)
      if (a.key == "dim") {
        seen.mark(a.key, a.line, a.key_col, "fiber");
        m = parse_count(a.value, a.line, a.value_col, "dim");
        have_m = true;
      }
    if (!have_m || m == 0) throw ParseError(s.line, 1, "[fiber] needs a positive dim");
    Fiber fb{m, Matrix::identity(m), std::nullopt};
    bool have_rows = false;
    std::vector<Assignment> acts;
    for (const auto& a : as) {
      if (a.key == "dim") continue;
      const auto toks = split_ws(a.key, a.key_col);
      if (!toks.empty() && toks[0].first == "row") {
        if (!have_rows) fb.twist = Matrix(m, m), have_rows = true;
        parse_alpha_row(a, m, fb.twist, seen, "fiber");
      } else if (!toks.empty() && toks[0].first == "action") {
        acts.push_back(a);
      } else {
        throw ParseError(a.line, a.key_col, "[fiber] unknown key '" + a.key + "'");
      }
    }
    if (have_rows) require_rows(seen, m, s.line, "fiber");
    if (doc.group) fb.action = GroupAction(*doc.group, m, parse_action_lines(acts, *doc.group, m, "fiber", s.line, true));
    else if (!acts.empty()) throw ParseError(acts.front().line, 1, "[fiber] action given without a [group] section");
    doc.fiber = std::move(fb);
  }

  for (const auto& s : sections) {
    if (s.kind == "extension") {
      if (!doc.fiber) throw ParseError(s.line, 1, "[extension " + s.name + "] requires a [fiber] section");
      const std::string where = "extension " + s.name;
      const std::size_t m = doc.fiber->dim, N = n + m;
      SeenKeys seen;
      Vector c(ipow(N, 4), Scalar(0));
      Matrix tw = Matrix::identity(N);
      bool have_rows = false, have_incl = false, have_proj = false, have_section = false;
      CentralExtension e;
      std::vector<Assignment> acts;
      for (const auto& a : assignments(s)) {
        const auto toks = split_ws(a.key, a.key_col);
        if (toks.empty()) throw ParseError(a.line, a.key_col, "[" + where + "] empty key");
        if (toks[0].first == "bracket") parse_bracket_line(a, N, c, seen, where);
        else if (toks[0].first == "row") {
          if (!have_rows) tw = Matrix(N, N), have_rows = true;
          parse_alpha_row(a, N, tw, seen, where);
        } else if (a.key == "incl") {
          seen.mark(a.key, a.line, a.key_col, where);
          e.incl = parse_matrix(a.value, a.value_col, a.line, N, m, "[" + where + "] incl");
          have_incl = true;
        } else if (a.key == "proj") {
          seen.mark(a.key, a.line, a.key_col, where);
          e.proj = parse_matrix(a.value, a.value_col, a.line, n, N, "[" + where + "] proj");
          have_proj = true;
        } else if (a.key == "section") {
          seen.mark(a.key, a.line, a.key_col, where);
          e.section = parse_matrix(a.value, a.value_col, a.line, N, n, "[" + where + "] section");
          have_section = true;
        } else if (toks[0].first == "action") {
          acts.push_back(a);
        } else {
          throw ParseError(a.line, a.key_col, "[" + where + "] unknown key '" + a.key + "'");
        }
      }
      if (!have_incl || !have_proj || !have_section)
        throw ParseError(s.line, 1, "[" + where + "] needs incl, proj and section");
      if (have_rows) require_rows(seen, N, s.line, where);
      e.base = doc.lts;
      e.base_action = doc.action;
      e.fiber = *doc.fiber;
      e.total = HomLts(N, std::move(c), std::move(tw));
      if (doc.group) e.action_total = GroupAction(*doc.group, N, parse_action_lines(acts, *doc.group, N, where, s.line, true));
      else if (!acts.empty()) throw ParseError(acts.front().line, 1, "[" + where + "] action given without a [group] section");
      doc.extensions.push_back({s.name, std::move(e)});
    } else if (s.kind == "cochain") {
      const std::string where = "cochain " + s.name;
      SeenKeys seen;
      const auto as = assignments(s);
      std::size_t degree = 0;
      std::string coeff = "adjoint";
      for (const auto& a : as) {
        if (a.key == "degree") {
          seen.mark(a.key, a.line, a.key_col, where);
          degree = parse_count(a.value, a.line, a.value_col, "degree");
          if (degree % 2 == 0) throw ParseError(a.line, a.value_col, "[" + where + "] degree must be odd");
        } else if (a.key == "coefficients") {
          seen.mark(a.key, a.line, a.key_col, where);
          coeff = a.value;
          if (coeff != "adjoint" && coeff != "representation" && coeff != "fiber")
            throw ParseError(a.line, a.value_col, "[" + where + "] coefficients must be adjoint, representation or fiber");
        }
      }
      if (degree == 0) throw ParseError(s.line, 1, "[" + where + "] missing degree");
      std::size_t m = n;
      char letter = 'e';
      if (coeff == "representation") {
        if (!doc.rep) throw ParseError(s.line, 1, "[" + where + "] needs a [representation] section");
        m = doc.rep->target_dim(), letter = 'v';
      } else if (coeff == "fiber") {
        if (!doc.fiber) throw ParseError(s.line, 1, "[" + where + "] needs a [fiber] section");
        m = doc.fiber->dim, letter = 'v';
      }
      if (!checked_pow(n, degree) || *checked_pow(n, degree) > 10000000)
        throw ParseError(s.line, 1, "[" + where + "] tensor too large to store");
      Cochain f = Cochain::zero(degree, n, m);
      for (const auto& a : as) {
        if (a.key == "degree" || a.key == "coefficients") continue;
        const auto toks = split_ws(a.key, a.key_col);
        if (toks.size() != degree + 1 || toks[0].first != "f")
          throw ParseError(a.line, a.key_col, "[" + where + "] expected 'f i_1 .. i_" + std::to_string(degree) + " = ...'");
        IndexTuple t(degree);
        std::string key = "f";
        for (std::size_t q = 0; q < degree; ++q) {
          t[q] = parse_index(toks[q + 1].first, n, a.line, toks[q + 1].second, "[" + where + "]");
          key += " " + std::to_string(t[q] + 1);
        }
        seen.mark(key, a.line, a.key_col, where);
        const Vector v = parse_combination(a.value, a.value_col, a.line, letter, m, "[" + where + "]");
        std::copy(v.begin(), v.end(), f.coeffs.begin() + static_cast<std::ptrdiff_t>(f.shape().index(t, 0)));
      }
      doc.cochains.push_back({s.name, coeff, std::move(f)});
    } else if (s.kind == "deformation") {
      const std::string where = "deformation " + s.name;
      SeenKeys seen;
      const auto as = assignments(s);
      std::optional<std::size_t> order;
      for (const auto& a : as)
        if (a.key == "order") {
          seen.mark(a.key, a.line, a.key_col, where);
          order = parse_count(a.value, a.line, a.value_col, "order");
        }
      std::map<std::size_t, Vector> terms;
      std::size_t max_r = 0;
      for (const auto& a : as) {
        if (a.key == "order") continue;
        const auto toks = split_ws(a.key, a.key_col);
        if (toks.size() != 4 || toks[0].first.rfind("mu_", 0) != 0)
          throw ParseError(a.line, a.key_col, "[" + where + "] expected 'mu_r i j k = ...'");
        const std::size_t r = parse_count(toks[0].first.substr(3), a.line, toks[0].second + 3, "term index");
        if (r == 0) throw ParseError(a.line, toks[0].second, "[" + where + "] term indices start at 1 (mu_0 is the bracket)");
        if (order && r > *order)
          throw ParseError(a.line, toks[0].second, "[" + where + "] term mu_" + std::to_string(r) + " beyond order");
        IndexTuple t(3);
        for (std::size_t q = 0; q < 3; ++q) t[q] = parse_index(toks[q + 1].first, n, a.line, toks[q + 1].second, "[" + where + "]");
        seen.mark(a.key.substr(0, toks[0].first.size()) + " " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
                      std::to_string(t[2] + 1),
                  a.line, a.key_col, where);
        auto& v = terms.try_emplace(r, Vector(ipow(n, 4), Scalar(0))).first->second;
        const Vector w = parse_combination(a.value, a.value_col, a.line, 'e', n, "[" + where + "]");
        for (std::size_t l = 0; l < n; ++l) v[((t[0] * n + t[1]) * n + t[2]) * n + l] = w[l];
        max_r = std::max(max_r, r);
      }
      Deformation d = Deformation::zero(doc.lts, doc.action, order.value_or(max_r));
      for (auto& [r, v] : terms) d.terms[r - 1] = std::move(v);
      doc.deformations.push_back({s.name, std::move(d)});
    } else if (s.kind == "isomorphism") {
      const std::string where = "isomorphism " + s.name;
      SeenKeys seen;
      const auto as = assignments(s);
      std::optional<std::size_t> order;
      NamedIsomorphism iso;
      iso.name = s.name;
      for (const auto& a : as) {
        if (a.key == "order") {
          seen.mark(a.key, a.line, a.key_col, where);
          order = parse_count(a.value, a.line, a.value_col, "order");
        } else if (a.key == "source" || a.key == "target") {
          seen.mark(a.key, a.line, a.key_col, where);
          (a.key == "source" ? iso.source : iso.target) = a.value;
        }
      }
      std::map<std::size_t, Matrix> maps;
      std::size_t max_r = 0;
      for (const auto& a : as) {
        if (a.key == "order" || a.key == "source" || a.key == "target") continue;
        if (a.key.rfind("psi_", 0) != 0) throw ParseError(a.line, a.key_col, "[" + where + "] expected 'psi_r = rows'");
        const std::size_t r = parse_count(a.key.substr(4), a.line, a.key_col + 4, "map index");
        if (r == 0) throw ParseError(a.line, a.key_col, "[" + where + "] map indices start at 1 (psi_0 is the identity)");
        if (order && r > *order) throw ParseError(a.line, a.key_col, "[" + where + "] map psi_" + std::to_string(r) + " beyond order");
        seen.mark(a.key, a.line, a.key_col, where);
        maps[r] = parse_matrix(a.value, a.value_col, a.line, n, n, "[" + where + "] " + a.key);
        max_r = std::max(max_r, r);
      }
      iso.psi = FormalIsomorphism::identity(doc.lts, doc.action, order.value_or(max_r));
      for (auto& [r, m] : maps) iso.psi.maps[r - 1] = std::move(m);
      doc.isomorphisms.push_back(std::move(iso));
    }
  }
  for (const auto& iso : doc.isomorphisms) {
    auto known = [&](const std::string& nm) {
      return nm.empty() || std::any_of(doc.deformations.begin(), doc.deformations.end(),
                                       [&](const NamedDeformation& d) { return d.name == nm; });
    };
    if (!known(iso.source) || !known(iso.target))
      throw ParseError(1, 1, "[isomorphism " + iso.name + "] refers to an unknown deformation");
  }
  return doc;
}

// Writers producing the same syntax, used for witnesses in reports.

inline std::string format_combination(std::span<const Scalar> v, char letter) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t l = 0; l < v.size(); ++l) {
    if (sgn(v[l]) == 0) continue;
    Scalar a = abs(v[l]);
    if (first) os << (sgn(v[l]) < 0 ? "-" : "");
    else os << (sgn(v[l]) < 0 ? " - " : " + ");
    if (a != 1) os << a.get_str() << " ";
    os << letter << "_" << l + 1;
    first = false;
  }
  return first ? "0" : os.str();
}

inline std::string format_matrix(const Matrix& m) {
  std::ostringstream os;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r) os << "; ";
    for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? " " : "") << m(r, c).get_str();
  }
  return os.str();
}

inline std::string format_tuple_key(const std::string& head, const IndexTuple& t) {
  std::string s = head;
  for (auto i : t) s += " " + std::to_string(i + 1);
  return s;
}

inline std::string write_cochain(const std::string& name, const std::string& coefficients, const Cochain& f) {
  std::ostringstream os;
  os << "[cochain " << name << "]\n";
  os << "degree = " << f.degree << "\n";
  os << "coefficients = " << coefficients << "\n";
  const char letter = coefficients == "adjoint" ? 'e' : 'v';
  for_each_tuple(f.n, f.degree, [&](const IndexTuple& t) {
    const auto v = f.value(t);
    if (!is_zero(v)) os << format_tuple_key("f", t) << " = " << format_combination(v, letter) << "\n";
  });
  return os.str();
}

inline std::string write_deformation(const std::string& name, const Deformation& d) {
  std::ostringstream os;
  os << "[deformation " << name << "]\n";
  os << "order = " << d.order() << "\n";
  const std::size_t n = d.base.dim();
  for (std::size_t r = 1; r <= d.order(); ++r)
    for_each_tuple(n, 3, [&](const IndexTuple& t) {
      std::span<const Scalar> v(d.mu(r).data() + ((t[0] * n + t[1]) * n + t[2]) * n, n);
      if (!is_zero(v)) os << format_tuple_key("mu_" + std::to_string(r), t) << " = " << format_combination(v, 'e') << "\n";
    });
  return os.str();
}

inline std::string write_isomorphism(const std::string& name, const FormalIsomorphism& psi, const std::string& source,
                                     const std::string& target) {
  std::ostringstream os;
  os << "[isomorphism " << name << "]\n";
  os << "order = " << psi.order() << "\n";
  if (!source.empty()) os << "source = " << source << "\n";
  if (!target.empty()) os << "target = " << target << "\n";
  for (std::size_t r = 1; r <= psi.order(); ++r)
    if (!psi.maps[r - 1].is_zero()) os << "psi_" << r << " = " << format_matrix(psi.maps[r - 1]) << "\n";
  return os.str();
}

inline std::string write_extension(const std::string& name, const CentralExtension& e) {
  std::ostringstream os;
  os << "[extension " << name << "]\n";
  const std::size_t N = e.total.dim();
  for_each_tuple(N, 3, [&](const IndexTuple& t) {
    const auto v = e.total.basis_bracket(t[0], t[1], t[2]);
    if (!is_zero(v)) os << format_tuple_key("bracket", t) << " = " << format_combination(v, 'e') << "\n";
  });
  for (std::size_t i = 0; i < N; ++i) {
    os << "row " << i + 1 << " =";
    for (std::size_t j = 0; j < N; ++j) os << " " << e.total.twist()(i, j).get_str();
    os << "\n";
  }
  os << "incl = " << format_matrix(e.incl) << "\n";
  os << "proj = " << format_matrix(e.proj) << "\n";
  os << "section = " << format_matrix(e.section) << "\n";
  if (e.action_total) {
    const auto& g = e.action_total->group();
    for (std::size_t x = 0; x < g.order(); ++x)
      os << "action " << g.labels()[x] << " = " << format_matrix(e.action_total->matrix(x)) << "\n";
  }
  return os.str();
}

}  // namespace homlts::cli
