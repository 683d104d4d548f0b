#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "qcgym/core.hpp"

namespace qcgym {

/// Interaction and coupling graphs side by side; logical nodes carry their
/// current physical assignment.
inline std::string render_mapping_dot(const Graph& interaction, const Graph& coupling, const Mapping& mapping) {
  std::ostringstream out;
  out << "graph mapping {\n";
  out << "  subgraph cluster_interaction {\n    label=\"interaction\";\n";
  for (int l = 0; l < interaction.n_nodes(); ++l) {
    out << "    l" << l << " [label=\"" << l;
    if (l < mapping.size() && mapping.is_mapped(l)) out << " -> " << mapping[l];
    out << "\"];\n";
  }
  for (auto [u, v] : interaction.edges()) out << "    l" << u << " -- l" << v << ";\n";
  out << "  }\n";
  out << "  subgraph cluster_coupling {\n    label=\"coupling\";\n";
  for (int p = 0; p < coupling.n_nodes(); ++p) {
    out << "    p" << p << " [label=\"" << p << "\"";
    if (mapping.physical_used(p)) out << ", style=filled";
    out << "];\n";
  }
  for (auto [u, v] : coupling.edges()) out << "    p" << u << " -- p" << v << ";\n";
  out << "  }\n}\n";
  return out.str();
}

namespace detail {
inline char gate_glyph(std::size_t i) {
  static const char* digits = "0123456789abcdefghijklmnopqrstuvwxyz";
  return i < 36 ? digits[i] : '*';
}
}  // namespace detail

/// One row per qubit, one column per cycle; cells show the running gate's
/// index, '.' when idle.
inline std::string render_gantt_text(const Schedule& s) {
  const auto& c = s.circuit();
  const int width = s.makespan();
  std::ostringstream out;
  out << "makespan " << width << '\n';
  for (int q = 0; q < c.n_qubits(); ++q) {
    std::string row(static_cast<std::size_t>(width), '.');
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i].acts_on(q))
        for (int t = s.start(i); t < s.finish(i); ++t) row[static_cast<std::size_t>(t)] = detail::gate_glyph(i);
    out << 'q' << q << " |" << row << "|\n";
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << detail::gate_glyph(i) << ": " << c[i].name;
    for (int q : c[i].operands) out << " q[" << q << ']';
    out << " @ " << s.start(i) << ".." << s.finish(i) << '\n';
  }
  return out.str();
}

inline std::string render_gantt_svg(const Schedule& s, int cell = 24) {
  const auto& c = s.circuit();
  const int label = 40;
  const int w = label + std::max(1, s.makespan()) * cell;
  const int h = std::max(1, c.n_qubits()) * cell;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  for (int q = 0; q < c.n_qubits(); ++q)
    out << "  <text x=\"4\" y=\"" << q * cell + cell * 2 / 3 << "\" font-size=\"12\">q" << q << "</text>\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (int q : c[i].operands) {
      const int x = label + s.start(i) * cell;
      const int y = q * cell;
      out << "  <rect x=\"" << x << "\" y=\"" << y + 2 << "\" width=\"" << s.duration(i) * cell << "\" height=\""
          << cell - 4 << "\" fill=\"#9cc\" stroke=\"#333\"/>\n";
      out << "  <text x=\"" << x + 3 << "\" y=\"" << y + cell * 2 / 3 << "\" font-size=\"11\">" << c[i].name
          << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

/// Machine-readable `gate_index start_cycle` lines.
inline std::string write_schedule(const Schedule& s) {
  std::ostringstream out;
  for (std::size_t i = 0; i < s.circuit().size(); ++i) out << i << ' ' << s.start(i) << '\n';
  return out.str();
}

inline std::vector<int> parse_schedule_starts(const std::string& text, std::size_t gate_count) {
  std::vector<int> starts(gate_count, -1);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::size_t idx;
    int start;
    if (!(ls >> idx >> start) || idx >= gate_count)
      throw std::invalid_argument("schedule: malformed line '" + line + "'");
    starts[idx] = start;
  }
  for (int s : starts)
    if (s < 0) throw std::invalid_argument("schedule: every gate needs a start cycle");
  return starts;
}

}  // namespace qcgym
