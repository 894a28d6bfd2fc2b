#pragma once

// Line-oriented substitution manifests.
//
//   name: <identifier>
//   dims: <d>
//   shape: block L1 ... Ld
//   shape: digits Q=[[..],..] D=(x,y);(x,y);...
//   alphabet: a b c
//   assert_aperiodic: true|false
//   geom: A=[[..],..] digits=(i0,i1,...)      (optional, digit systems only)
//
//   rule a:
//   <rows>
//
// Block rows: one row per (n_2, ..., n_d) in lexicographic order, tokens
// along n_1. Digit systems: one row listing the images in digit order.

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "subshift/core.hpp"
#include "subshift/symmetry.hpp"

namespace subshift {

struct ManifestGeom {
  Mat A;
  std::vector<std::size_t> digits;
  bool operator==(const ManifestGeom& o) const { return A == o.A && digits == o.digits; }
};

struct Manifest {
  std::string name;
  std::size_t dims = 0;
  bool block = true;
  Vec lengths;
  Mat Q;
  std::vector<Vec> digits;
  std::vector<std::string> alphabet;
  std::vector<std::vector<Letter>> rules;  // canonical digit order
  bool assert_aperiodic = false;
  std::vector<ManifestGeom> geoms;

  bool operator==(const Manifest& o) const {
    return name == o.name && dims == o.dims && block == o.block && lengths == o.lengths && Q == o.Q && digits == o.digits &&
           alphabet == o.alphabet && rules == o.rules && assert_aperiodic == o.assert_aperiodic && geoms == o.geoms;
  }

  DigitSystem system() const { return block ? DigitSystem::block(lengths) : DigitSystem::explicit_digits(Q, digits); }
  Substitution substitution() const { return Substitution(alphabet, system(), rules); }

  std::vector<GeomCandidate> candidates() const {
    std::vector<GeomCandidate> out;
    DigitSystem s = system();
    for (const auto& g : geoms) out.push_back(GeomCandidate::explicit_table(g.A, s, g.digits));
    return out;
  }
};

struct ParseError : InputError {
  ParseError(std::size_t line, std::size_t col, const std::string& msg)
      : InputError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg, "ParseError"), line_(line), col_(col) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

 private:
  std::size_t line_, col_;
};

namespace detail {

// Cursor over one line for small bracketed integer grammars.
class LineCursor {
 public:
  LineCursor(const std::string& s, std::size_t line, std::size_t col0) : s_(s), line_(line), col0_(col0) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void expect_word(const std::string& w) {
    skip_ws();
    if (s_.compare(pos_, w.size(), w) != 0) fail("expected '" + w + "'");
    pos_ += w.size();
  }
  Int integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      fail("expected an integer");
    }
    try {
      return std::stoll(s_.substr(start, pos_ - start));
    } catch (const std::exception&) {
      pos_ = start;
      fail("integer out of range");
    }
  }
  Vec int_list(char open, char close) {
    expect(open);
    Vec v;
    if (peek(close)) {
      ++pos_;
      return v;
    }
    for (;;) {
      v.push_back(integer());
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect(close);
      return v;
    }
  }
  Mat matrix() {
    expect('[');
    Mat m;
    for (;;) {
      m.push_back(int_list('[', ']'));
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect(']');
      return m;
    }
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col0_ + pos_ + 1, msg); }
  std::size_t column() const { return col0_ + pos_ + 1; }

 private:
  const std::string& s_;
  std::size_t line_, col0_;
  std::size_t pos_ = 0;
};

struct Token {
  std::string text;
  std::size_t col;
};

inline std::vector<Token> split_tokens(const std::string& s, std::size_t col0 = 0) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    out.push_back({s.substr(i, j - i), col0 + i + 1});
    i = j;
  }
  return out;
}

inline bool valid_letter_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '{' || c == '}' || c == '#' || c == ':' || c == '|') return false;
  return true;
}

}  // namespace detail

inline Manifest parse_manifest(const std::string& text) {
  Manifest m;
  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      lines.push_back(l);
    }
  }
  std::set<std::string> seen;
  std::map<std::string, Letter> letters;
  std::vector<std::optional<std::vector<Letter>>> rules;
  std::vector<std::size_t> rule_line;
  std::optional<std::size_t> current;  // letter whose rows are being read
  std::vector<std::vector<detail::Token>> rows;
  std::vector<std::size_t> row_lines;
  std::size_t cells_expected = 0, row_len = 0, row_count = 0;

  auto header_done = [&]() { return seen.count("alphabet") && seen.count("shape") && seen.count("dims"); };
  auto finish_rule = [&](std::size_t line_no) {
    if (!current) return;
    std::size_t a = *current;
    std::vector<Letter> cells(cells_expected);
    if (rows.size() != row_count)
      throw ParseError(rows.empty() ? rule_line[a] : row_lines.back(), 1,
                       "rule for letter " + m.alphabet[a] + " has " + std::to_string(rows.size()) + " row(s), expected " + std::to_string(row_count));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != row_len)
        throw ParseError(row_lines[r], rows[r].empty() ? 1 : rows[r].back().col,
                         "row has " + std::to_string(rows[r].size()) + " cell(s), expected " + std::to_string(row_len));
      for (std::size_t t = 0; t < row_len; ++t) {
        auto it = letters.find(rows[r][t].text);
        if (it == letters.end()) throw ParseError(row_lines[r], rows[r][t].col, "unknown letter '" + rows[r][t].text + "'");
        std::size_t idx;
        if (m.block && m.dims >= 1) {
          // row r enumerates (n_2..n_d); token t is n_1
          std::size_t inner = cells_expected / static_cast<std::size_t>(m.lengths[0]);
          idx = t * inner + r;
        } else {
          idx = t;
        }
        cells[idx] = it->second;
      }
    }
    rules[a] = cells;
    current.reset();
    rows.clear();
    row_lines.clear();
    (void)line_no;
  };

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string& line = lines[ln];
    std::size_t line_no = ln + 1;
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      continue;
    }
    if (line[first] == '#') continue;
    if (line.compare(first, 5, "rule ") == 0) {
      if (!header_done()) throw ParseError(line_no, first + 1, "rule before the dims, shape and alphabet headers");
      finish_rule(line_no);
      std::size_t colon = line.find(':', first);
      if (colon == std::string::npos) throw ParseError(line_no, line.size() + 1, "expected ':' after the rule letter");
      std::string rest = line.substr(colon + 1);
      if (rest.find_first_not_of(" \t") != std::string::npos) throw ParseError(line_no, colon + 2, "unexpected text after 'rule <letter>:'");
      std::string nm = line.substr(first + 5, colon - first - 5);
      while (!nm.empty() && std::isspace(static_cast<unsigned char>(nm.back()))) nm.pop_back();
      while (!nm.empty() && std::isspace(static_cast<unsigned char>(nm.front()))) nm.erase(nm.begin());
      auto it = letters.find(nm);
      if (it == letters.end()) throw ParseError(line_no, first + 6, "rule for unknown letter '" + nm + "'");
      if (rules[it->second]) throw ParseError(line_no, first + 6, "duplicate rule for letter '" + nm + "'");
      current = it->second;
      rule_line[it->second] = line_no;
      continue;
    }
    if (current) {
      rows.push_back(detail::split_tokens(line));
      row_lines.push_back(line_no);
      continue;
    }
    std::size_t colon = line.find(':', first);
    if (colon == std::string::npos) throw ParseError(line_no, first + 1, "expected 'key: value'");
    std::string key = line.substr(first, colon - first);
    std::string value = line.substr(colon + 1);
    std::size_t vcol = colon + 1;
    if (key != "geom" && !seen.insert(key).second) throw ParseError(line_no, first + 1, "duplicate key '" + key + "'");
    auto toks = detail::split_tokens(value, vcol);
    if (key == "name") {
      if (toks.size() != 1) throw ParseError(line_no, vcol + 1, "name must be a single token");
      m.name = toks[0].text;
    } else if (key == "dims") {
      if (toks.size() != 1) throw ParseError(line_no, vcol + 1, "dims must be a single integer");
      detail::LineCursor c(toks[0].text, line_no, toks[0].col - 1);
      Int d = c.integer();
      if (!c.done()) c.fail("trailing characters after dims");
      if (d < 1) throw ParseError(line_no, toks[0].col, "dims must be positive");
      m.dims = static_cast<std::size_t>(d);
    } else if (key == "shape") {
      if (!seen.count("dims")) throw ParseError(line_no, first + 1, "shape before dims");
      if (toks.empty()) throw ParseError(line_no, vcol + 1, "missing shape kind");
      if (toks[0].text == "block") {
        m.block = true;
        for (std::size_t i = 1; i < toks.size(); ++i) {
          detail::LineCursor c(toks[i].text, line_no, toks[i].col - 1);
          Int l = c.integer();
          if (!c.done()) c.fail("trailing characters after block length");
          if (l < 1) throw ParseError(line_no, toks[i].col, "block lengths must be positive");
          m.lengths.push_back(l);
        }
        if (m.lengths.size() != m.dims)
          throw ParseError(line_no, vcol + 1, "shape has " + std::to_string(m.lengths.size()) + " length(s), dims is " + std::to_string(m.dims));
        bool big = false;
        for (Int l : m.lengths) big = big || l >= 2;
        if (!big) throw ParseError(line_no, vcol + 1, "at least one block length must be at least 2");
      } else if (toks[0].text == "digits") {
        m.block = false;
        std::size_t off = value.find("digits") + 6;
        std::string rest = value.substr(off);
        detail::LineCursor c(rest, line_no, vcol + off);
        c.expect_word("Q=");
        m.Q = c.matrix();
        c.expect_word("D=");
        for (;;) {
          m.digits.push_back(c.int_list('(', ')'));
          if (c.peek(';')) {
            c.expect(';');
            continue;
          }
          break;
        }
        if (!c.done()) c.fail("trailing characters after digit list");
        if (m.Q.size() != m.dims) c.fail("expansion matrix size differs from dims");
        for (const auto& r : m.Q)
          if (r.size() != m.dims) c.fail("expansion matrix must be square");
        for (const auto& d : m.digits)
          if (d.size() != m.dims) c.fail("digit dimension differs from dims");
        auto viol = validate_digit_system(DigitSystem::explicit_digits(m.Q, m.digits));
        if (!viol.empty()) throw ParseError(line_no, vcol + 1, "invalid digit system: " + viol.front());
      } else {
        throw ParseError(line_no, toks[0].col, "unknown shape kind '" + toks[0].text + "'");
      }
    } else if (key == "alphabet") {
      if (toks.empty()) throw ParseError(line_no, vcol + 1, "alphabet must not be empty");
      for (const auto& t : toks) {
        if (!detail::valid_letter_name(t.text)) throw ParseError(line_no, t.col, "invalid letter name '" + t.text + "'");
        if (!letters.emplace(t.text, static_cast<Letter>(m.alphabet.size())).second)
          throw ParseError(line_no, t.col, "duplicate letter '" + t.text + "'");
        m.alphabet.push_back(t.text);
      }
      rules.assign(m.alphabet.size(), std::nullopt);
      rule_line.assign(m.alphabet.size(), 0);
    } else if (key == "assert_aperiodic") {
      if (toks.size() != 1 || (toks[0].text != "true" && toks[0].text != "false"))
        throw ParseError(line_no, vcol + 1, "assert_aperiodic must be true or false");
      m.assert_aperiodic = toks[0].text == "true";
    } else if (key == "geom") {
      if (!seen.count("shape") || m.block) throw ParseError(line_no, first + 1, "geom lines are only allowed after a digits shape");
      detail::LineCursor c(value, line_no, vcol);
      ManifestGeom g;
      c.expect_word("A=");
      g.A = c.matrix();
      c.expect_word("digits=");
      Vec d = c.int_list('(', ')');
      if (!c.done()) c.fail("trailing characters after geom");
      for (Int x : d) {
        if (x < 0) c.fail("digit indices must be nonnegative");
        g.digits.push_back(static_cast<std::size_t>(x));
      }
      try {
        GeomCandidate::explicit_table(g.A, DigitSystem::explicit_digits(m.Q, m.digits), g.digits);
      } catch (const Error& e) {
        throw ParseError(line_no, vcol + 1, e.what());
      }
      m.geoms.push_back(g);
    } else {
      throw ParseError(line_no, first + 1, "unknown key '" + key + "'");
    }
    if (seen.count("shape") && seen.count("dims") && key == "shape") {
      DigitSystem s = m.system();
      cells_expected = s.size();
      if (m.block) {
        row_len = static_cast<std::size_t>(m.lengths[0]);
        row_count = cells_expected / row_len;
      } else {
        row_len = cells_expected;
        row_count = 1;
      }
    }
  }
  finish_rule(lines.size());
  for (const char* k : {"name", "dims", "shape", "alphabet"})
    if (!seen.count(k)) throw ParseError(lines.size() + 1, 1, std::string("missing header '") + k + "'");
  for (std::size_t a = 0; a < m.alphabet.size(); ++a) {
    if (!rules[a]) throw ParseError(lines.size() + 1, 1, "missing rule for letter " + m.alphabet[a]);
    m.rules.push_back(*rules[a]);
  }
  return m;
}

inline Manifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'", "FileNotFound");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_manifest(ss.str());
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what(), "ParseError");
  }
}

inline std::string serialize_manifest(const Manifest& m) {
  std::ostringstream os;
  os << "name: " << m.name << "\n";
  os << "dims: " << m.dims << "\n";
  if (m.block) {
    os << "shape: block";
    for (Int l : m.lengths) os << " " << l;
    os << "\n";
  } else {
    os << "shape: digits Q=" << format_mat(m.Q) << " D=";
    for (std::size_t i = 0; i < m.digits.size(); ++i) os << (i ? ";" : "") << format_vec(m.digits[i]);
    os << "\n";
  }
  os << "alphabet:";
  for (const auto& a : m.alphabet) os << " " << a;
  os << "\n";
  os << "assert_aperiodic: " << (m.assert_aperiodic ? "true" : "false") << "\n";
  for (const auto& g : m.geoms) {
    os << "geom: A=" << format_mat(g.A) << " digits=(";
    for (std::size_t i = 0; i < g.digits.size(); ++i) os << (i ? "," : "") << g.digits[i];
    os << ")\n";
  }
  os << "\n";
  std::size_t n = m.rules.empty() ? 0 : m.rules[0].size();
  for (std::size_t a = 0; a < m.alphabet.size(); ++a) {
    os << "rule " << m.alphabet[a] << ":\n";
    if (m.block) {
      std::size_t l1 = static_cast<std::size_t>(m.lengths[0]);
      std::size_t inner = n / l1;
      for (std::size_t r = 0; r < inner; ++r) {
        for (std::size_t t = 0; t < l1; ++t) os << (t ? " " : "") << m.alphabet[m.rules[a][t * inner + r]];
        os << "\n";
      }
    } else {
      for (std::size_t t = 0; t < n; ++t) os << (t ? " " : "") << m.alphabet[m.rules[a][t]];
      os << "\n";
    }
  }
  return os.str();
}

inline Manifest manifest_from_substitution(const Substitution& sub, const std::string& name) {
  Manifest m;
  m.name = name;
  m.dims = sub.dim();
  m.block = sub.system().is_block();
  if (m.block)
    m.lengths = sub.system().lengths();
  else {
    m.Q = sub.system().Q();
    m.digits = sub.system().digits();
  }
  m.alphabet = sub.names();
  m.rules = sub.rules();
  return m;
}

}  // namespace subshift
