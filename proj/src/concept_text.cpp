#include <algorithm>
#include <cctype>
#include <sstream>

#include "relearn/cube.hpp"
#include "relearn/errors.hpp"

namespace relearn {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

long long parse_int(const std::string& tok) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw InputError("bad integer '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    throw InputError("bad integer '" + tok + "'");
  }
}

Literal parse_literal(const std::string& tok) {
  const long long v = parse_int(tok);
  if (v == 0) throw InputError("literal index 0 is not allowed (indices are 1-based)");
  return Literal{static_cast<int>(v < 0 ? -v : v), v < 0};
}

std::vector<Clause> parse_clauses(const std::string& body) {
  std::vector<Clause> clauses;
  std::size_t pos = 0;
  while (true) {
    pos = body.find_first_not_of(" \t", pos);
    if (pos == std::string::npos) break;
    if (body[pos] != '(') throw InputError("expected '(' in clause list: " + body);
    const auto close = body.find(')', pos);
    if (close == std::string::npos) throw InputError("unterminated clause: " + body);
    std::istringstream in(body.substr(pos + 1, close - pos - 1));
    Clause c;
    for (std::string tok; in >> tok;) c.push_back(parse_literal(tok));
    clauses.push_back(std::move(c));
    pos = close + 1;
  }
  return clauses;
}

int max_var(const Clause& c) {
  int m = 0;
  for (const auto& l : c) m = std::max(m, l.var);
  return m;
}

std::string format_literal(const Literal& l) {
  return (l.negated ? "-" : "+") + std::to_string(l.var);
}

std::string format_clause_list(const Clause& c) {
  std::string s;
  for (const auto& l : c) s += " " + format_literal(l);
  return s;
}

}  // namespace

Concept parse_concept(const std::string& text, std::optional<int> n) {
  std::istringstream in(text);
  std::string head;
  if (!(in >> head)) throw InputError("empty concept text");
  head = upper(head);
  std::string rest;
  std::getline(in, rest);

  if (head == "MAJ" || head == "DISJ" || head == "CONJ" || head == "HALFSPACE") {
    std::istringstream toks(rest);
    std::vector<std::string> items;
    for (std::string t; toks >> t;) items.push_back(t);

    if (head == "HALFSPACE") {
      if (items.empty()) throw InputError("HALFSPACE needs w0 and weights");
      Halfspace h;
      h.w0 = parse_int(items[0]);
      for (std::size_t i = 1; i < items.size(); ++i) h.w.push_back(parse_int(items[i]));
      const int dim = static_cast<int>(h.w.size());
      if (n && *n != dim) {
        throw InputError("HALFSPACE lists " + std::to_string(dim) + " weights but n = " +
                         std::to_string(*n));
      }
      return Concept(dim, h);
    }
    if (head == "MAJ") {
      std::vector<int> vars;
      for (const auto& t : items) {
        const long long v = parse_int(t);
        if (v <= 0) throw InputError("majority variables are positive 1-based indices");
        vars.push_back(static_cast<int>(v));
      }
      const int inferred = vars.empty() ? 0 : *std::max_element(vars.begin(), vars.end());
      return Concept(n.value_or(inferred), Majority{vars});
    }
    Clause lits;
    for (const auto& t : items) lits.push_back(parse_literal(t));
    const int dim = n.value_or(max_var(lits));
    if (head == "DISJ") return Concept(dim, Disjunction{lits});
    return Concept(dim, Conjunction{lits});
  }
  if (head == "DNF" || head == "CNF") {
    auto clauses = parse_clauses(rest);
    int inferred = 0;
    for (const auto& c : clauses) inferred = std::max(inferred, max_var(c));
    const int dim = n.value_or(inferred);
    if (head == "DNF") return Concept(dim, Dnf{clauses});
    return Concept(dim, Cnf{clauses});
  }
  throw InputError("unknown concept kind '" + head + "'");
}

std::string to_string(const Concept& c) {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disjunction>) {
          return "DISJ" + format_clause_list(k.literals);
        } else if constexpr (std::is_same_v<T, Conjunction>) {
          return "CONJ" + format_clause_list(k.literals);
        } else if constexpr (std::is_same_v<T, Majority>) {
          std::string s = "MAJ";
          for (int v : k.vars) s += " " + std::to_string(v);
          return s;
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          std::string s = "HALFSPACE " + std::to_string(k.w0);
          for (auto w : k.w) s += " " + std::to_string(w);
          return s;
        } else {
          std::string s = std::is_same_v<T, Dnf> ? "DNF " : "CNF ";
          for (const auto& clause : k.clauses) {
            std::string body = format_clause_list(clause);
            s += "(" + (body.empty() ? body : body.substr(1)) + ")";
          }
          return s;
        }
      },
      c.kind());
}

}  // namespace relearn
