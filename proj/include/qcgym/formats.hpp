#pragma once

#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qcgym/core.hpp"

namespace qcgym {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto s = line.substr(0, line.find('#'));
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline int parse_count(const std::string& text, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + text + "'");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// QASM subset:
//   qubits <n>
//   <name> q[<i>]
//   <name> q[<i>], q[<j>]
// '#' starts a comment; names are lowercase tokens.
inline Circuit parse_circuit(const std::string& text) {
  static const std::regex header(R"(^qubits\s+(\S+)$)");
  static const std::regex gate_line(R"(^([a-z][a-z0-9_]*)\s+q\[(\d+)\]\s*(?:,\s*q\[(\d+)\])?$)");

  std::istringstream in(text);
  std::string raw;
  std::optional<Circuit> circuit;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::strip_comment(raw);
    if (line.empty()) continue;
    std::smatch m;
    if (!circuit) {
      if (!std::regex_match(line, m, header)) throw ParseError(line_no, "expected 'qubits <n>' header");
      const int n = detail::parse_count(m[1], line_no);
      if (n <= 0) throw ParseError(line_no, "qubit count must be positive");
      circuit.emplace(n);
      continue;
    }
    if (!std::regex_match(line, m, gate_line)) throw ParseError(line_no, "malformed gate '" + line + "'");
    Gate g{m[1], {detail::parse_count(m[2], line_no)}};
    if (m[3].matched) g.operands.push_back(detail::parse_count(m[3], line_no));
    try {
      circuit->add(std::move(g));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!circuit) throw ParseError(line_no, "missing 'qubits <n>' header");
  return *circuit;
}

inline std::string write_circuit(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.n_qubits() << '\n';
  for (const auto& g : c.gates()) {
    out << g.name << " q[" << g.operands[0] << ']';
    if (g.is_two_qubit()) out << ", q[" << g.operands[1] << ']';
    out << '\n';
  }
  return out.str();
}

/// Interaction circuits travel as two-qubit-only circuits.
inline Circuit as_circuit(const InteractionCircuit& ic, const std::string& gate_name = "cnot") {
  Circuit c(ic.n_qubits());
  for (auto [a, b] : ic.pairs()) c.add(gate(gate_name, a, b));
  return c;
}

// Graph file:
//   nodes <n>
//   edge <u> <v>
inline Graph parse_graph(const std::string& text) {
  static const std::regex header(R"(^nodes\s+(\S+)$)");
  static const std::regex edge_line(R"(^edge\s+(\S+)\s+(\S+)$)");

  std::istringstream in(text);
  std::string raw;
  int n = -1;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::strip_comment(raw);
    if (line.empty()) continue;
    std::smatch m;
    if (n < 0) {
      if (!std::regex_match(line, m, header)) throw ParseError(line_no, "expected 'nodes <n>' header");
      n = detail::parse_count(m[1], line_no);
      if (n <= 0) throw ParseError(line_no, "node count must be positive");
      continue;
    }
    if (!std::regex_match(line, m, edge_line)) throw ParseError(line_no, "malformed edge '" + line + "'");
    edges.emplace_back(detail::parse_count(m[1], line_no), detail::parse_count(m[2], line_no));
  }
  if (n < 0) throw ParseError(line_no, "missing 'nodes <n>' header");
  try {
    return Graph(n, edges);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, e.what());
  }
}

inline std::string write_graph(const Graph& g) {
  std::ostringstream out;
  out << "nodes " << g.n_nodes() << '\n';
  for (auto [u, v] : g.edges()) out << "edge " << u << ' ' << v << '\n';
  return out.str();
}

inline Circuit load_circuit(const std::string& path) { return parse_circuit(detail::read_file(path)); }
inline Graph load_graph(const std::string& path) { return parse_graph(detail::read_file(path)); }

}  // namespace qcgym
