#include "qlocc/qset.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace qlocc {
namespace {

class LineCursor {
 public:
  LineCursor(std::string_view text, int line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  bool accept_word(std::string_view w) {
    skip_space();
    if (text_.substr(pos_, w.size()) != w) return false;
    pos_ += w.size();
    return true;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) fail(ErrorCode::Syntax, std::string("expected ") + what);
  }
  int column() const { return static_cast<int>(pos_) + 1; }
  int line() const { return line_; }

  std::string lexeme() {
    skip_space();
    std::size_t end = pos_;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end]))) ++end;
    if (end == pos_) return "<end of line>";
    return std::string(text_.substr(pos_, end - pos_));
  }

  [[noreturn]] void fail(ErrorCode code, const std::string& msg) {
    const std::string lex = lexeme();
    throw ParseError(code, line_, column(), lex, msg);
  }

  // Unsigned decimal number, optionally with fraction and exponent.
  double number() {
    skip_space();
    const char* begin = text_.data() + pos_;
    std::size_t n = 0;
    while (pos_ + n < text_.size()) {
      const char c = text_[pos_ + n];
      const bool exp_sign = n > 0 && (c == '+' || c == '-') && (text_[pos_ + n - 1] == 'e' || text_[pos_ + n - 1] == 'E');
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || exp_sign) {
        ++n;
      } else {
        break;
      }
    }
    if (n == 0 || (!std::isdigit(static_cast<unsigned char>(*begin)) && *begin != '.')) fail(ErrorCode::Syntax, "expected a number");
    const std::string tok(begin, n);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail(ErrorCode::Syntax, "malformed number");
    }
    if (used != tok.size()) fail(ErrorCode::Syntax, "malformed number");
    pos_ += n;
    return v;
  }

  double signed_number() {
    const bool neg = accept('-');
    if (!neg) accept('+');
    const double v = number();
    return neg ? -v : v;
  }

  int integer() {
    skip_space();
    std::size_t n = 0;
    while (pos_ + n < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + n]))) ++n;
    if (n == 0) fail(ErrorCode::Syntax, "expected an integer");
    if (n > 9) fail(ErrorCode::Syntax, "integer too large");
    const int v = std::stoi(std::string(text_.substr(pos_, n)));
    pos_ += n;
    return v;
  }

  std::string_view rest() {
    skip_space();
    return text_.substr(pos_);
  }
  std::string_view take_until(char c) {
    skip_space();
    const std::size_t end = text_.find(c, pos_);
    if (end == std::string_view::npos) fail(ErrorCode::Syntax, std::string("expected '") + c + "'");
    std::string_view out = text_.substr(pos_, end - pos_);
    pos_ = end;
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.remove_suffix(1);
    return out;
  }
  std::size_t pos() const { return pos_; }
  void rewind(std::size_t p) { pos_ = p; }

 private:
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

// coefficient := number | number '/' number | number '/' 'sqrt(' number ')' | '(' re ',' im ')'
Complex coefficient(LineCursor& c) {
  if (c.accept('(')) {
    const double re = c.signed_number();
    c.expect(',', "',' in complex coefficient");
    const double im = c.signed_number();
    c.expect(')', "')' closing complex coefficient");
    return {re, im};
  }
  const double num = c.number();
  if (!c.accept('/')) return num;
  if (c.accept_word("sqrt")) {
    c.expect('(', "'(' after sqrt");
    const double n = c.number();
    c.expect(')', "')' closing sqrt");
    if (n <= 0) c.fail(ErrorCode::Syntax, "sqrt argument must be positive");
    return num / std::sqrt(n);
  }
  const double den = c.number();
  if (den == 0) c.fail(ErrorCode::Syntax, "division by zero");
  return num / den;
}

std::vector<int> ket_indices(LineCursor& c, const PartySpace& space) {
  const int col = c.column();
  c.expect('|', "'|' opening a ket");
  std::vector<int> idx;
  do {
    const int at = c.column();
    const int v = c.integer();
    const int party = static_cast<int>(idx.size());
    if (party >= space.parties()) {
      throw ParseError(ErrorCode::Dimension, c.line(), at, std::to_string(v), "ket has more indices than parties");
    }
    if (v >= space.dim(party)) {
      throw ParseError(ErrorCode::Dimension, c.line(), at, std::to_string(v),
                       "index out of range for party " + std::to_string(party));
    }
    idx.push_back(v);
  } while (c.accept(','));
  c.expect('>', "'>' closing a ket");
  if (static_cast<int>(idx.size()) != space.parties()) {
    throw ParseError(ErrorCode::Dimension, c.line(), col, "|...>", "ket needs one index per party");
  }
  return idx;
}

std::string strip_comment(std::string_view line) {
  const auto h = line.find('#');
  return std::string(h == std::string_view::npos ? line : line.substr(0, h));
}

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // drop negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

StateSet parse_qset(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur += ch;
      }
    }
    lines.push_back(cur);
  }

  bool header = false;
  std::optional<std::vector<int>> dims;
  std::vector<std::vector<int>> splits;
  std::string name;
  PartySpace space;
  StateSet out;
  std::set<std::string> seen;
  int last_line = 0;

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const int line = static_cast<int>(ln) + 1;
    const std::string body = strip_comment(lines[ln]);
    LineCursor c(body, line);
    if (c.at_end()) continue;
    last_line = line;
    if (!header) {
      if (!c.accept_word("qset")) c.fail(ErrorCode::Syntax, "document must start with 'qset v1'");
      if (!c.accept_word("v1")) c.fail(ErrorCode::Syntax, "unsupported version");
      if (!c.at_end()) c.fail(ErrorCode::Syntax, "unexpected text after header");
      header = true;
      continue;
    }
    if (c.accept_word("dims:")) {
      if (dims) c.fail(ErrorCode::Syntax, "duplicate dims line");
      std::vector<int> d;
      while (!c.at_end()) {
        const int at = c.column();
        const int v = c.integer();
        if (v < 2) throw ParseError(ErrorCode::Dimension, line, at, std::to_string(v), "party dimension must be >= 2");
        d.push_back(v);
      }
      if (d.empty()) c.fail(ErrorCode::Syntax, "dims line lists no parties");
      dims = d;
      splits.assign(d.size(), {});
      continue;
    }
    if (c.accept_word("split:")) {
      if (!dims) c.fail(ErrorCode::Syntax, "split before dims");
      if (!out.states.empty()) c.fail(ErrorCode::Syntax, "split after the first state");
      const int at = c.column();
      const int party = c.integer();
      if (party >= static_cast<int>(dims->size())) {
        throw ParseError(ErrorCode::Split, line, at, std::to_string(party), "split names a missing party");
      }
      c.expect('=', "'=' in split");
      std::vector<int> f;
      long prod = 1;
      while (!c.at_end()) {
        f.push_back(c.integer());
        prod *= f.back();
      }
      if (f.empty()) c.fail(ErrorCode::Syntax, "split lists no factors");
      if (prod != (*dims)[party]) {
        throw ParseError(ErrorCode::Split, line, at, std::to_string(party),
                         "split factors multiply to " + std::to_string(prod) + ", party dimension is " +
                             std::to_string((*dims)[party]));
      }
      splits[party] = f;
      continue;
    }
    if (c.accept_word("name:")) {
      name = std::string(c.rest());
      continue;
    }
    const std::size_t mark = c.pos();
    if (c.accept_word("state") && c.pos() < body.size() && std::isspace(static_cast<unsigned char>(body[c.pos()]))) {
      if (!dims) c.fail(ErrorCode::Syntax, "state before dims");
      if (out.states.empty()) space = PartySpace(*dims, splits);
      const int label_col = c.column();
      const std::string label(c.take_until(':'));
      c.expect(':', "':' after state label");
      if (label.empty() || label.find_first_of(" \t") != std::string::npos) {
        throw ParseError(ErrorCode::Syntax, line, label_col, label.empty() ? ":" : label,
                         "state label must be one non-empty word");
      }
      if (!seen.insert(label).second) {
        throw ParseError(ErrorCode::DuplicateLabel, line, label_col, label, "duplicate state label");
      }
      std::vector<Term> terms;
      bool first = true;
      while (!c.at_end()) {
          double sign = 1.0;
          if (c.accept('-')) {
            sign = -1.0;
          } else if (!c.accept('+') && !first) {
            c.fail(ErrorCode::Syntax, "expected '+' or '-' between terms");
          }
          Complex coef = 1.0;
          if (c.peek() != '|') {
            coef = coefficient(c);
            c.expect('*', "'*' between coefficient and ket");
          }
          terms.push_back({sign * coef, ket_indices(c, space)});
          first = false;
      }
      if (terms.empty()) throw ParseError(ErrorCode::EmptyState, line, c.column(), label, "state has no terms");
      try {
        out.states.push_back(make_ket(space, terms, label));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyState) {
          throw ParseError(ErrorCode::EmptyState, line, label_col, label, "state amplitudes sum to zero");
        }
        throw;
      }
      continue;
    }
    c.rewind(mark);
    c.fail(ErrorCode::Syntax, "expected 'dims:', 'split:', 'name:' or 'state'");
  }
  if (!header) throw ParseError(ErrorCode::Syntax, 1, 1, "<empty>", "document must start with 'qset v1'");
  if (!dims) throw ParseError(ErrorCode::Syntax, last_line, 1, "<end of input>", "missing dims line");
  if (out.states.empty()) throw ParseError(ErrorCode::EmptyState, last_line, 1, "<end of input>", "document has no states");
  out.space = space;
  out.name = name;
  return out;
}

StateSet load_qset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_qset(buf.str());
}

std::string serialize_qset(const StateSet& s) {
  validate(s);
  std::string out = "qset v1\ndims:";
  for (int d : s.space.dims()) out += " " + std::to_string(d);
  out += "\n";
  for (int p = 0; p < s.space.parties(); ++p) {
    if (!s.space.has_split(p)) continue;
    out += "split: " + std::to_string(p) + " =";
    for (int f : s.space.split(p)) out += " " + std::to_string(f);
    out += "\n";
  }
  if (!s.name.empty()) out += "name: " + s.name + "\n";
  const auto& dims = s.space.dims();
  for (const auto& k : s.states) {
    out += "state " + k.label + ":";
    bool first = true;
    for (Eigen::Index i = 0; i < k.amplitudes.size(); ++i) {
      const Complex a = k.amplitudes(i);
      if (a == Complex(0.0, 0.0)) continue;
      out += first ? " " : " + ";
      first = false;
      out += "(" + format_double(a.real()) + "," + format_double(a.imag()) + ")*|";
      const auto idx = multi_index(dims, i);
      for (std::size_t p = 0; p < idx.size(); ++p) out += (p ? "," : "") + std::to_string(idx[p]);
      out += ">";
    }
    out += "\n";
  }
  return out;
}

}  // namespace qlocc
