#include "onefactor/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "onefactor/error.hpp"

namespace onefactor {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

bool parse_number(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_pair_line(const std::string& line,
                                                        std::size_t lineno) {
  auto tokens = split_spaces(line);
  std::uint64_t a = 0, b = 0;
  if (tokens.size() != 2 || !parse_number(tokens[0], a) || !parse_number(tokens[1], b)) {
    parse_fail(lineno, "expected two non-negative integers, got \"" + line + "\"");
  }
  return {a, b};
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) parse_fail(1, "missing header");
  auto [n, m] = parse_pair_line(line, 1);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    std::size_t lineno = i + 2;
    if (!next_line(in, line)) parse_fail(lineno, "expected " + std::to_string(m) + " edges");
    auto [u, v] = parse_pair_line(line, lineno);
    if (u >= n || v >= n) parse_fail(lineno, "vertex out of range");
    if (u == v) parse_fail(lineno, "self-loop");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  while (next_line(in, line)) {
    if (!line.empty()) parse_fail(m + 2, "trailing content");
  }
  try {
    return Graph::from_edge_list(n, std::span<const Edge>(edges));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

std::string edge_list_text(const Graph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

std::pair<std::size_t, Factorization> read_factorization(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) parse_fail(1, "missing header");
  auto [n, t] = parse_pair_line(line, 1);
  Factorization f;
  f.matchings.reserve(t);
  for (std::uint64_t i = 0; i < t; ++i) {
    std::size_t lineno = i + 2;
    if (!next_line(in, line)) parse_fail(lineno, "expected " + std::to_string(t) + " matchings");
    std::vector<Edge> edges;
    for (std::string_view tok : split_spaces(line)) {
      auto dash = tok.find('-');
      std::uint64_t u = 0, v = 0;
      if (dash == std::string_view::npos || !parse_number(tok.substr(0, dash), u) ||
          !parse_number(tok.substr(dash + 1), v)) {
        parse_fail(lineno, "bad edge token \"" + std::string(tok) + "\"");
      }
      if (u >= n || v >= n || u == v) parse_fail(lineno, "bad edge " + std::string(tok));
      edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    f.matchings.emplace_back(std::move(edges));
  }
  while (next_line(in, line)) {
    if (!line.empty()) parse_fail(t + 2, "trailing content");
  }
  return {n, std::move(f)};
}

void write_factorization(std::ostream& out, std::size_t n, const Factorization& f) {
  out << n << ' ' << f.size() << '\n';
  for (const Matching& m : f.matchings) {
    for (std::size_t i = 0; i < m.edges.size(); ++i) {
      if (i) out << ' ';
      out << m.edges[i].u << '-' << m.edges[i].v;
    }
    out << '\n';
  }
}

std::string factorization_text(std::size_t n, const Factorization& f) {
  std::ostringstream out;
  write_factorization(out, n, f);
  return out.str();
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return read_edge_list(in);
}

std::pair<std::size_t, Factorization> load_factorization(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return read_factorization(in);
}

}  // namespace onefactor
