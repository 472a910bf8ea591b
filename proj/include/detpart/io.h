#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "detpart/hypergraph.h"
#include "detpart/types.h"

namespace detpart {

class ParseError : public std::runtime_error {
 public:
  enum class Kind {
    kBadHeader,
    kBadFormat,
    kBadToken,
    kPinOutOfRange,
    kDuplicatePin,
    kEmptyEdge,
    kTruncated,
    kTrailingData,
    kNonPositiveWeight,
    kInconsistentAdjacency,
    kSelfLoop,
    kEdgeCountMismatch,
    kTooLarge,
  };

  ParseError(Kind kind, std::size_t line, const std::string& message);

  Kind kind() const { return kind_; }
  // 1-based line number in the input, 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

enum class InputFormat { kHmetis, kMetis };

// hMetis hypergraph: header "|E| |V| [fmt]" with fmt in {1, 10, 11}, one
// 1-based pin line per hyperedge, then |V| vertex weight lines if fmt is 10
// or 11. Lines starting with '%' are comments.
Hypergraph parse_hmetis(std::string_view text);
Hypergraph parse_hmetis(std::istream& in);

// Metis graph: header "n m [fmt [ncon]]"; every undirected edge becomes one
// hyperedge of size two, stored once.
Hypergraph parse_metis_graph(std::string_view text);
Hypergraph parse_metis_graph(std::istream& in);

// ".hgr" -> hMetis, ".graph"/".metis" -> Metis; throws std::invalid_argument.
InputFormat detect_format(std::string_view path);
Hypergraph read_hypergraph_file(const std::string& path, InputFormat format);

// One block id per line, in vertex order.
std::string write_partition(std::span<const BlockId> assignment);
std::vector<BlockId> parse_partition(std::string_view text);
void write_partition_file(const std::string& path, std::span<const BlockId> assignment);

// FNV-1a over the assignment, each block id as 4 little-endian bytes.
std::uint64_t partition_hash(std::span<const BlockId> assignment);
std::string hash_to_hex(std::uint64_t hash);

struct PhaseTimes {
  double coarsening = 0.0;
  double initial = 0.0;
  double jet = 0.0;
  double flows = 0.0;
  double rebalance = 0.0;

  friend bool operator==(const PhaseTimes&, const PhaseTimes&) = default;
};

struct PhaseHash {
  std::string phase;
  std::uint64_t hash = 0;

  friend bool operator==(const PhaseHash&, const PhaseHash&) = default;
};

struct RunRecord {
  std::string instance;
  BlockId k = 0;
  std::string epsilon;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string preset;
  PhaseTimes times;
  Gain metric = 0;
  double imbalance = 0.0;
  bool balanced = false;
  std::uint64_t partition_hash = 0;
  std::vector<PhaseHash> phase_hashes;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Single-line JSON object with keys in lexicographic order (no newline).
std::string write_run_record(const RunRecord& record);
RunRecord parse_run_record(std::string_view line);
// Appends the record plus '\n' to a JSON-lines file.
void append_run_record(const std::string& path, const RunRecord& record);

}  // namespace detpart
