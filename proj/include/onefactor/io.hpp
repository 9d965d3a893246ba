#pragma once

#include <iosfwd>
#include <string>

#include "onefactor/graph.hpp"

namespace onefactor {

// Edge list: "n m" then m lines "u v" (u < v). Factorization: "n t" then t
// lines of space separated "u-v" tokens. Both LF terminated, no comments.

Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);
std::string edge_list_text(const Graph& g);

/// Returns the declared vertex count alongside the matchings.
std::pair<std::size_t, Factorization> read_factorization(std::istream& in);
void write_factorization(std::ostream& out, std::size_t n, const Factorization& f);
std::string factorization_text(std::size_t n, const Factorization& f);

Graph load_edge_list(const std::string& path);
std::pair<std::size_t, Factorization> load_factorization(const std::string& path);

}  // namespace onefactor
