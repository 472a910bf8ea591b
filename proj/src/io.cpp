#include "detpart/io.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace detpart {

ParseError::ParseError(Kind kind, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      kind_(kind),
      line_(line) {}

namespace {

using Kind = ParseError::Kind;

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next physical line; false at end of input.
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto nl = text_.find('\n', pos_);
    const auto end = nl == std::string_view::npos ? text_.size() : nl;
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
    ++line_no_;
    return true;
  }

  // Next line that is not a comment; blank lines are returned when
  // keep_blank is set, skipped otherwise.
  bool next_content(std::string_view& line, bool keep_blank) {
    while (next(line)) {
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string_view::npos) {
        if (keep_blank) return true;
        continue;
      }
      if (line[first] == '%') continue;
      return true;
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::uint64_t parse_uint(std::string_view token, std::size_t line) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(Kind::kBadToken, line, "expected a non-negative integer, got '" + std::string(token) + "'");
  }
  return value;
}

Weight parse_weight(std::string_view token, std::size_t line) {
  const std::uint64_t w = parse_uint(token, line);
  if (w == 0) throw ParseError(Kind::kNonPositiveWeight, line, "weights must be positive");
  if (w > static_cast<std::uint64_t>(std::numeric_limits<Weight>::max() / 4)) {
    throw ParseError(Kind::kTooLarge, line, "weight too large");
  }
  return static_cast<Weight>(w);
}

Hypergraph build_or_throw(std::size_t n, std::vector<std::size_t> offsets, std::vector<VertexId> pins,
                          std::vector<Weight> edge_weights, std::vector<Weight> vertex_weights) {
  try {
    return Hypergraph::from_csr(n, std::move(offsets), std::move(pins), std::move(edge_weights),
                                std::move(vertex_weights));
  } catch (const InvalidHypergraph& e) {
    throw ParseError(Kind::kTooLarge, 0, e.what());
  }
}

std::string slurp(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

Hypergraph parse_hmetis(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next_content(line, false)) throw ParseError(Kind::kBadHeader, 0, "missing header");
  const auto header = split_tokens(line);
  const std::size_t header_line = reader.line_no();
  if (header.size() < 2 || header.size() > 3) {
    throw ParseError(Kind::kBadHeader, header_line, "header must be '|E| |V| [fmt]'");
  }
  const std::uint64_t num_edges = parse_uint(header[0], header_line);
  const std::uint64_t num_vertices = parse_uint(header[1], header_line);
  if (num_vertices >= kInvalidVertex || num_edges >= std::numeric_limits<EdgeId>::max()) {
    throw ParseError(Kind::kTooLarge, header_line, "instance too large");
  }
  std::uint64_t fmt = 0;
  if (header.size() == 3) {
    fmt = parse_uint(header[2], header_line);
    if (fmt != 0 && fmt != 1 && fmt != 10 && fmt != 11) {
      throw ParseError(Kind::kBadFormat, header_line, "unsupported fmt " + std::string(header[2]));
    }
  }
  const bool has_edge_weights = fmt == 1 || fmt == 11;
  const bool has_vertex_weights = fmt == 10 || fmt == 11;

  std::vector<std::size_t> offsets;
  offsets.reserve(num_edges + 1);
  offsets.push_back(0);
  std::vector<VertexId> pins;
  std::vector<Weight> edge_weights;
  if (has_edge_weights) edge_weights.reserve(num_edges);
  std::vector<std::uint64_t> stamp(num_vertices, 0);

  for (std::uint64_t e = 0; e < num_edges; ++e) {
    if (!reader.next_content(line, false)) {
      throw ParseError(Kind::kTruncated, reader.line_no() + 1,
                       "expected " + std::to_string(num_edges) + " hyperedges, found " + std::to_string(e));
    }
    const std::size_t ln = reader.line_no();
    const auto tokens = split_tokens(line);
    std::size_t first_pin = 0;
    if (has_edge_weights) {
      edge_weights.push_back(parse_weight(tokens[0], ln));
      first_pin = 1;
    }
    if (tokens.size() <= first_pin) throw ParseError(Kind::kEmptyEdge, ln, "hyperedge has no pins");
    for (std::size_t t = first_pin; t < tokens.size(); ++t) {
      const std::uint64_t pin = parse_uint(tokens[t], ln);
      if (pin < 1 || pin > num_vertices) {
        throw ParseError(Kind::kPinOutOfRange, ln, "pin " + std::to_string(pin) + " out of range");
      }
      if (stamp[pin - 1] == e + 1) {
        throw ParseError(Kind::kDuplicatePin, ln, "duplicate pin " + std::to_string(pin));
      }
      stamp[pin - 1] = e + 1;
      pins.push_back(static_cast<VertexId>(pin - 1));
    }
    offsets.push_back(pins.size());
  }

  std::vector<Weight> vertex_weights;
  if (has_vertex_weights) {
    vertex_weights.reserve(num_vertices);
    for (std::uint64_t v = 0; v < num_vertices; ++v) {
      if (!reader.next_content(line, false)) {
        throw ParseError(Kind::kTruncated, reader.line_no() + 1,
                         "expected " + std::to_string(num_vertices) + " vertex weights, found " + std::to_string(v));
      }
      const auto tokens = split_tokens(line);
      if (tokens.size() != 1) throw ParseError(Kind::kBadToken, reader.line_no(), "expected one vertex weight");
      vertex_weights.push_back(parse_weight(tokens[0], reader.line_no()));
    }
  }
  if (reader.next_content(line, false)) {
    throw ParseError(Kind::kTrailingData, reader.line_no(), "unexpected data after last record");
  }
  return build_or_throw(num_vertices, std::move(offsets), std::move(pins), std::move(edge_weights),
                        std::move(vertex_weights));
}

Hypergraph parse_hmetis(std::istream& in) { return parse_hmetis(slurp(in)); }

Hypergraph parse_metis_graph(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next_content(line, false)) throw ParseError(Kind::kBadHeader, 0, "missing header");
  const std::size_t header_line = reader.line_no();
  const auto header = split_tokens(line);
  if (header.size() < 2 || header.size() > 4) {
    throw ParseError(Kind::kBadHeader, header_line, "header must be 'n m [fmt [ncon]]'");
  }
  const std::uint64_t n = parse_uint(header[0], header_line);
  const std::uint64_t m = parse_uint(header[1], header_line);
  if (n >= kInvalidVertex || m >= std::numeric_limits<EdgeId>::max()) {
    throw ParseError(Kind::kTooLarge, header_line, "instance too large");
  }
  bool has_vertex_weights = false;
  bool has_edge_weights = false;
  if (header.size() >= 3) {
    std::string fmt(header[2]);
    if (fmt.size() > 3 || fmt.find_first_not_of("01") != std::string::npos) {
      throw ParseError(Kind::kBadFormat, header_line, "unsupported fmt " + fmt);
    }
    fmt.insert(0, 3 - fmt.size(), '0');
    if (fmt[0] == '1') throw ParseError(Kind::kBadFormat, header_line, "vertex sizes are not supported");
    has_vertex_weights = fmt[1] == '1';
    has_edge_weights = fmt[2] == '1';
  }
  if (header.size() == 4 && parse_uint(header[3], header_line) != 1) {
    throw ParseError(Kind::kBadFormat, header_line, "multi-constraint weights are not supported");
  }

  struct Arc {
    VertexId from;
    VertexId to;
    Weight weight;
  };
  std::vector<Arc> arcs;
  arcs.reserve(2 * m);
  std::vector<Weight> vertex_weights;
  if (has_vertex_weights) vertex_weights.reserve(n);
  std::vector<std::size_t> vertex_line(n, 0);
  std::vector<std::uint64_t> stamp(n, 0);

  for (std::uint64_t u = 0; u < n; ++u) {
    if (!reader.next_content(line, true)) {
      throw ParseError(Kind::kTruncated, reader.line_no() + 1,
                       "expected " + std::to_string(n) + " adjacency lines, found " + std::to_string(u));
    }
    const std::size_t ln = reader.line_no();
    vertex_line[u] = ln;
    const auto tokens = split_tokens(line);
    std::size_t t = 0;
    if (has_vertex_weights) {
      if (tokens.empty()) throw ParseError(Kind::kTruncated, ln, "missing vertex weight");
      vertex_weights.push_back(parse_weight(tokens[0], ln));
      t = 1;
    }
    const std::size_t stride = has_edge_weights ? 2 : 1;
    if ((tokens.size() - t) % stride != 0) throw ParseError(Kind::kBadToken, ln, "neighbor without edge weight");
    for (; t < tokens.size(); t += stride) {
      const std::uint64_t v = parse_uint(tokens[t], ln);
      if (v < 1 || v > n) throw ParseError(Kind::kPinOutOfRange, ln, "neighbor " + std::to_string(v) + " out of range");
      if (v - 1 == u) throw ParseError(Kind::kSelfLoop, ln, "self loop");
      if (stamp[v - 1] == u + 1) throw ParseError(Kind::kDuplicatePin, ln, "duplicate neighbor " + std::to_string(v));
      stamp[v - 1] = u + 1;
      const Weight w = has_edge_weights ? parse_weight(tokens[t + 1], ln) : 1;
      arcs.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v - 1), w});
    }
  }
  if (reader.next_content(line, false)) {
    throw ParseError(Kind::kTrailingData, reader.line_no(), "unexpected data after last adjacency line");
  }

  // Every arc u->v needs a matching v->u with the same weight.
  std::vector<Arc> reversed = arcs;
  for (auto& a : reversed) std::swap(a.from, a.to);
  auto by_endpoints = [](const Arc& a, const Arc& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  };
  std::sort(reversed.begin(), reversed.end(), by_endpoints);
  for (const Arc& a : arcs) {
    const auto it = std::lower_bound(reversed.begin(), reversed.end(), a, by_endpoints);
    if (it == reversed.end() || it->from != a.from || it->to != a.to) {
      throw ParseError(Kind::kInconsistentAdjacency, vertex_line[a.to],
                       "vertex " + std::to_string(a.to + 1) + " does not list neighbor " + std::to_string(a.from + 1));
    }
    if (it->weight != a.weight) {
      throw ParseError(Kind::kInconsistentAdjacency, vertex_line[a.from],
                       "edge weight mismatch between " + std::to_string(a.from + 1) + " and " + std::to_string(a.to + 1));
    }
  }
  if (arcs.size() != 2 * m) {
    throw ParseError(Kind::kEdgeCountMismatch, header_line,
                     "header declares " + std::to_string(m) + " edges, found " + std::to_string(arcs.size() / 2));
  }

  std::vector<std::size_t> offsets{0};
  offsets.reserve(m + 1);
  std::vector<VertexId> pins;
  pins.reserve(2 * m);
  std::vector<Weight> edge_weights;
  edge_weights.reserve(m);
  for (const Arc& a : arcs) {
    if (a.from > a.to) continue;
    pins.push_back(a.from);
    pins.push_back(a.to);
    offsets.push_back(pins.size());
    edge_weights.push_back(a.weight);
  }
  return build_or_throw(n, std::move(offsets), std::move(pins), std::move(edge_weights), std::move(vertex_weights));
}

Hypergraph parse_metis_graph(std::istream& in) { return parse_metis_graph(slurp(in)); }

InputFormat detect_format(std::string_view path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
  };
  if (ends_with(".hgr")) return InputFormat::kHmetis;
  if (ends_with(".graph") || ends_with(".metis")) return InputFormat::kMetis;
  throw std::invalid_argument("cannot detect input format of '" + std::string(path) + "', use --format");
}

Hypergraph read_hypergraph_file(const std::string& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return format == InputFormat::kHmetis ? parse_hmetis(in) : parse_metis_graph(in);
}

std::string write_partition(std::span<const BlockId> assignment) {
  std::string out;
  out.reserve(assignment.size() * 3);
  char buf[16];
  for (BlockId b : assignment) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), b);
    out.append(buf, ptr);
    out.push_back('\n');
  }
  return out;
}

std::vector<BlockId> parse_partition(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  std::vector<BlockId> out;
  while (reader.next_content(line, false)) {
    const auto tokens = split_tokens(line);
    if (tokens.size() != 1) throw ParseError(Kind::kBadToken, reader.line_no(), "expected one block id");
    const std::uint64_t b = parse_uint(tokens[0], reader.line_no());
    if (b > static_cast<std::uint64_t>(std::numeric_limits<BlockId>::max())) {
      throw ParseError(Kind::kTooLarge, reader.line_no(), "block id too large");
    }
    out.push_back(static_cast<BlockId>(b));
  }
  return out;
}

void write_partition_file(const std::string& path, std::span<const BlockId> assignment) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const std::string text = write_partition(assignment);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::uint64_t partition_hash(std::span<const BlockId> assignment) {
  Fnv1a h;
  for (BlockId b : assignment) h.add_u32(static_cast<std::uint32_t>(b));
  return h.value();
}

std::string hash_to_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

std::uint64_t hex_to_hash(const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.size() != 16) {
    throw std::invalid_argument("malformed hash '" + text + "'");
  }
  return value;
}

}  // namespace

std::string write_run_record(const RunRecord& r) {
  nlohmann::json j;
  j["instance"] = r.instance;
  j["k"] = r.k;
  j["epsilon"] = r.epsilon;
  j["seed"] = r.seed;
  j["threads"] = r.threads;
  j["preset"] = r.preset;
  j["times"] = {{"coarsening", r.times.coarsening},
                {"initial", r.times.initial},
                {"jet", r.times.jet},
                {"flows", r.times.flows},
                {"rebalance", r.times.rebalance}};
  j["metric"] = r.metric;
  j["imbalance"] = r.imbalance;
  j["balanced"] = r.balanced;
  j["partition_hash"] = hash_to_hex(r.partition_hash);
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& p : r.phase_hashes) phases.push_back({{"phase", p.phase}, {"hash", hash_to_hex(p.hash)}});
  j["phase_hashes"] = std::move(phases);
  return j.dump();
}

RunRecord parse_run_record(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  RunRecord r;
  r.instance = j.at("instance").get<std::string>();
  r.k = j.at("k").get<BlockId>();
  r.epsilon = j.at("epsilon").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.threads = j.at("threads").get<int>();
  r.preset = j.at("preset").get<std::string>();
  const auto& t = j.at("times");
  r.times = {t.at("coarsening").get<double>(), t.at("initial").get<double>(), t.at("jet").get<double>(),
             t.at("flows").get<double>(), t.at("rebalance").get<double>()};
  r.metric = j.at("metric").get<Gain>();
  r.imbalance = j.at("imbalance").get<double>();
  r.balanced = j.at("balanced").get<bool>();
  r.partition_hash = hex_to_hash(j.at("partition_hash").get<std::string>());
  for (const auto& p : j.at("phase_hashes")) {
    r.phase_hashes.push_back({p.at("phase").get<std::string>(), hex_to_hash(p.at("hash").get<std::string>())});
  }
  return r;
}

void append_run_record(const std::string& path, const RunRecord& record) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << write_run_record(record) << '\n';
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace detpart
