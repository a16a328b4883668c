#pragma once

#include <sstream>
#include <string>

#include "boxtopos/phase_space.hpp"
#include "boxtopos/poset.hpp"

namespace boxtopos {

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string dot_label(const std::string& id) {
  return id.empty() ? "{}" : dot_escape(id);
}

}  // namespace detail

// Hasse diagram: one node per element in canonical order, one edge per
// covering pair, drawn upward.
inline std::string poset_dot(const FinitePoset& p,
                             const std::string& name = "poset") {
  std::ostringstream os;
  os << "digraph \"" << detail::dot_escape(name) << "\" {\n";
  os << "  rankdir=BT;\n  node [shape=box];\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    os << "  n" << i << " [label=\"" << detail::dot_label(p.id_of(i))
       << "\"];\n";
  for (const auto& [lo, hi] : p.covers())
    os << "  n" << lo << " -> n" << hi << ";\n";
  os << "}\n";
  return os.str();
}

// Phase space with the fibration drawn explicitly: one cluster per context,
// covering edges between points.
inline std::string phase_space_dot(const PhaseSpace& ps,
                                   const std::string& name = "phase_space") {
  std::ostringstream os;
  os << "digraph \"" << detail::dot_escape(name) << "\" {\n";
  os << "  rankdir=BT;\n  node [shape=ellipse];\n";
  for (std::size_t ci = 0; ci < ps.contexts.size(); ++ci) {
    os << "  subgraph cluster_" << ci << " {\n";
    os << "    label=\"" << detail::dot_label(ps.contexts.id_of(ci))
       << "\";\n";
    for (std::size_t p = 0; p < ps.points.size(); ++p)
      if (ps.fiber[p].first == ci)
        os << "    n" << p << " [label=\""
           << detail::dot_label(ps.points.id_of(p)) << "\"];\n";
    os << "  }\n";
  }
  for (const auto& [lo, hi] : ps.points.covers())
    os << "  n" << lo << " -> n" << hi << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace boxtopos
