#include "grainfsr/text_format.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace grainfsr {

namespace {

// Cursor over one line; columns are 1-based.
class LineReader {
 public:
  LineReader(std::string_view line, int lineno) : s_(line), lineno_(lineno) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  int column() const { return static_cast<int>(pos_) + 1; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(lineno_, column(), msg); }

  bool accept(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-'))
        ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }

  long long integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string digits(s_.substr(start, pos_ - start));
    if (digits.empty() || digits == "-" || digits == "+") {
      pos_ = start;
      fail("expected integer");
    }
    try {
      return std::stoll(digits);
    } catch (const std::exception&) {
      pos_ = start;
      fail("integer out of range");
    }
  }

  bool peek_digit() {
    skip_ws();
    return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]));
  }

  // <id>[<index>]
  Var bit_ref() {
    std::string id = ident();
    expect("[");
    long long idx = integer();
    expect("]");
    if (idx < 0 || idx > 1'000'000) fail("bit index out of range");
    return Var{id, static_cast<int>(idx)};
  }

  AnfExpr expr() {
    AnfExpr acc;
    do {
      bool vanishes = false;
      std::vector<Var> vars;
      do {
        if (peek_digit()) {
          long long lit = integer();
          if (lit != 0 && lit != 1) fail("only the literals 0 and 1 are allowed");
          vanishes |= lit == 0;
        } else {
          std::string id = ident();
          if (accept("[")) {
            long long idx = integer();
            expect("]");
            if (idx < 0 || idx > 1'000'000) fail("bit index out of range");
            vars.push_back(Var{id, static_cast<int>(idx)});
          } else {
            vars.push_back(Var{id, Var::kSignal});
          }
        }
      } while (accept("*"));
      if (vanishes) continue;
      if (vars.empty())
        acc = AnfExpr(acc.terms(), !acc.constant());
      else
        acc = xor_merge(acc, TermSet{ProductTerm(std::move(vars))});
    } while (accept("+"));
    return acc;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int lineno_;
};

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

}  // namespace

AnfExpr parse_expr(std::string_view text) {
  LineReader r(text, 1);
  AnfExpr e = r.expr();
  if (!r.at_end()) r.fail("unexpected trailing text");
  return e;
}

SpecDocument parse_spec(std::string_view text) {
  SpecDocument doc;
  auto& spec = doc.spec;
  bool have_system = false;

  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const int lineno = static_cast<int>(ln) + 1;
    LineReader r(lines[ln], lineno);
    if (r.at_end()) continue;
    const int directive_col = r.column();
    const std::string kw = r.ident();
    auto record = [&](const std::string& key) {
      if (!doc.lines.emplace(key, lineno).second)
        throw ParseError(lineno, directive_col, "duplicate " + key);
    };

    if (kw == "system") {
      if (have_system) r.fail("only one system per document");
      spec.name = r.ident();
      have_system = true;
    } else if (kw == "register") {
      RegisterSpec reg;
      reg.id = r.ident();
      long long len = r.integer();
      if (len < 1 || len > 1'000'000) r.fail("register length must be positive");
      reg.length = static_cast<int>(len);
      record("register " + reg.id);
      spec.registers.push_back(std::move(reg));
    } else if (kw == "feedback") {
      Var target = r.bit_ref();
      r.expect("=");
      AnfExpr e = r.expr();
      auto* reg = spec.find_register(target.reg);
      if (!reg) throw ParseError(lineno, directive_col, "undeclared register " + target.reg);
      if (target.index >= reg->length)
        throw ParseError(lineno, directive_col, "index out of range: " + to_string(target));
      record("feedback " + to_string(target));
      reg->feedback[target.index] = std::move(e);
    } else if (kw == "output") {
      std::string name = r.ident();
      r.expect("=");
      AnfExpr e = r.expr();
      record("output " + name);
      spec.outputs.push_back(NamedOutput{name, std::move(e)});
    } else if (kw == "inject") {
      Injection inj;
      inj.mode = r.ident();
      Var target = r.bit_ref();
      r.expect("=");
      inj.reg = target.reg;
      inj.bit = target.index;
      inj.output = r.ident();
      record("inject " + inj.mode + " " + to_string(target));
      spec.injections.push_back(std::move(inj));
    } else if (kw == "param") {
      std::string key = r.ident();
      r.expect("=");
      long long v = r.integer();
      record("param " + key);
      spec.params[key] = v;
    } else {
      throw ParseError(lineno, directive_col, "unknown directive '" + kw + "'");
    }
    if (!r.at_end()) r.fail("unexpected trailing text");
  }
  if (!have_system) throw ParseError(1, 1, "no system declared");

  // Semantic checks, reported at the offending directive.
  auto line_of = [&](const std::string& key) {
    auto it = doc.lines.find(key);
    return it == doc.lines.end() ? 1 : it->second;
  };
  for (const auto& reg : spec.registers) {
    for (const auto& [bit, e] : reg.feedback) {
      const std::string key = "feedback " + to_string(Var{reg.id, bit});
      try {
        for (const auto& t : e.terms())
          for (const auto& v : t.vars()) {
            if (v.is_signal()) throw Error("output reference " + v.reg + " not allowed in feedback");
            const auto* target = spec.find_register(v.reg);
            if (!target) throw Error("undeclared register " + v.reg);
            if (v.index >= target->length) throw Error("index out of range: " + to_string(v));
          }
      } catch (const Error& err) {
        throw ParseError(line_of(key), 1, err.what());
      }
    }
  }
  for (const auto& o : spec.outputs) {
    for (const auto& t : o.expr.terms())
      for (const auto& v : t.vars()) {
        std::string msg;
        if (v.is_signal()) {
          if (!spec.find_output(v.reg)) msg = "undeclared output " + v.reg;
        } else if (const auto* target = spec.find_register(v.reg); !target) {
          msg = "undeclared register " + v.reg;
        } else if (v.index >= target->length) {
          msg = "index out of range: " + to_string(v);
        }
        if (!msg.empty()) throw ParseError(line_of("output " + o.name), 1, msg);
      }
  }
  for (const auto& inj : spec.injections) {
    const std::string key = "inject " + inj.mode + " " + to_string(Var{inj.reg, inj.bit});
    try {
      const auto& reg = spec.reg(inj.reg);
      if (inj.bit >= reg.length) throw Error("index out of range");
      if (!spec.find_output(inj.output)) throw Error("undeclared output " + inj.output);
    } catch (const Error& err) {
      throw ParseError(line_of(key), 1, err.what());
    }
  }
  try {
    validate(spec);
  } catch (const Error& err) {
    int line = 1;
    std::string what = err.what();
    for (const auto& o : spec.outputs)
      if (what.find(o.name) != std::string::npos) line = line_of("output " + o.name);
    throw ParseError(line, 1, what);
  }
  for (auto& reg : spec.registers) reg.normalize();
  return doc;
}

std::string format_spec(const SystemSpec& spec) {
  std::ostringstream out;
  out << "system " << spec.name << "\n";
  for (const auto& reg : spec.registers) out << "register " << reg.id << " " << reg.length << "\n";
  for (const auto& [k, v] : spec.params) out << "param " << k << " = " << v << "\n";
  for (const auto& reg : spec.registers)
    for (auto it = reg.feedback.rbegin(); it != reg.feedback.rend(); ++it) {
      if (reg.is_shift(it->first)) continue;
      out << "feedback " << to_string(Var{reg.id, it->first}) << " = " << to_string(it->second) << "\n";
    }
  for (const auto& o : spec.outputs) out << "output " << o.name << " = " << to_string(o.expr) << "\n";
  for (const auto& inj : spec.injections)
    out << "inject " << inj.mode << " " << to_string(Var{inj.reg, inj.bit}) << " = " << inj.output
        << "\n";
  return out.str();
}

ShiftScript parse_script(std::string_view text) {
  ShiftScript script;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    LineReader r(lines[ln], static_cast<int>(ln) + 1);
    if (r.at_end()) continue;
    if (r.ident() != "shift") r.fail("expected 'shift'");
    ShiftMove move;
    move.reg = r.ident();
    move.source = static_cast<int>(r.integer());
    r.expect("->");
    move.dest = static_cast<int>(r.integer());
    r.expect(":");
    do {
      std::vector<Var> vars;
      do {
        vars.push_back(r.bit_ref());
      } while (r.accept("*"));
      ProductTerm t(std::move(vars));
      if (!move.terms.insert(t).second) r.fail("duplicate term " + to_string(t));
    } while (r.accept(","));
    if (!r.at_end()) r.fail("unexpected trailing text");
    script.push_back(std::move(move));
  }
  return script;
}

std::string format_script(const ShiftScript& script) {
  std::ostringstream out;
  for (const auto& m : script) {
    out << "shift " << m.reg << " " << m.source << " -> " << m.dest << " :";
    bool first = true;
    for (const auto& t : m.terms) {
      out << (first ? " " : ", ") << to_string(t);
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

std::string pack_bits(const Bits& bits, BitOrder order) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  const std::size_t bytes = (bits.size() + 7) / 8;
  out.reserve(bytes * 2);
  for (std::size_t b = 0; b < bytes; ++b) {
    unsigned v = 0;
    for (std::size_t j = 0; j < 8 && b * 8 + j < bits.size(); ++j)
      if (bits[b * 8 + j]) v |= 1u << (order == BitOrder::lsb ? j : 7 - j);
    out += kHex[v >> 4];
    out += kHex[v & 15];
  }
  return out;
}

Bits unpack_bits(std::string_view hex, BitOrder order, std::optional<std::size_t> nbits) {
  if (hex.size() % 2) throw Error("hex input has odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  const std::size_t bytes = hex.size() / 2;
  if (nbits && bytes != (*nbits + 7) / 8)
    throw Error("expected " + std::to_string((*nbits + 7) / 8) + " hex bytes, got " +
                std::to_string(bytes));
  Bits out;
  out.reserve(bytes * 8);
  for (std::size_t b = 0; b < bytes; ++b) {
    int hi = nibble(hex[2 * b]), lo = nibble(hex[2 * b + 1]);
    if (hi < 0 || lo < 0) throw Error("non-hex character in input");
    unsigned v = static_cast<unsigned>(hi * 16 + lo);
    for (int j = 0; j < 8; ++j)
      out.push_back(static_cast<std::uint8_t>((v >> (order == BitOrder::lsb ? j : 7 - j)) & 1u));
  }
  if (nbits) out.resize(*nbits);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace grainfsr
