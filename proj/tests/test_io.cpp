#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <streambuf>

#include "detpart/io.h"
#include "detpart/random.h"
#include "support/instances.h"

using namespace detpart;
using Kind = ParseError::Kind;

namespace {

// Hands out the text in chunks of `chunk` bytes per underflow.
class ChunkedBuf : public std::streambuf {
 public:
  ChunkedBuf(std::string text, std::size_t chunk) : text_(std::move(text)), chunk_(chunk) {}

 protected:
  int_type underflow() override {
    if (pos_ >= text_.size()) return traits_type::eof();
    const std::size_t n = std::min(chunk_, text_.size() - pos_);
    char* p = text_.data() + pos_;
    setg(p, p, p + n);
    pos_ += n;
    return traits_type::to_int_type(*p);
  }

 private:
  std::string text_;
  std::size_t chunk_;
  std::size_t pos_ = 0;
};

Kind hmetis_error(std::string_view text, std::size_t* line = nullptr) {
  try {
    parse_hmetis(text);
  } catch (const ParseError& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  FAIL("no parse error for: " << text);
  return Kind::kBadHeader;
}

Kind metis_error(std::string_view text) {
  try {
    parse_metis_graph(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("no parse error for: " << text);
  return Kind::kBadHeader;
}

bool same(const Hypergraph& a, const Hypergraph& b) {
  return a.num_vertices() == b.num_vertices() && a.num_edges() == b.num_edges() &&
         std::ranges::equal(a.pin_array(), b.pin_array()) && std::ranges::equal(a.edge_offsets(), b.edge_offsets()) &&
         std::ranges::equal(a.edge_weights(), b.edge_weights()) &&
         std::ranges::equal(a.vertex_weights(), b.vertex_weights());
}

std::string to_hmetis(const Hypergraph& hg) {
  std::ostringstream out;
  out << hg.num_edges() << ' ' << hg.num_vertices() << " 11\n";
  for (EdgeId e = 0; e < hg.num_edges(); ++e) {
    out << hg.edge_weight(e);
    for (VertexId p : hg.pins(e)) out << ' ' << p + 1;
    out << '\n';
  }
  for (VertexId v = 0; v < hg.num_vertices(); ++v) out << hg.vertex_weight(v) << '\n';
  return out.str();
}

}  // namespace

TEST_CASE("hmetis minimal file") {
  const Hypergraph hg = parse_hmetis("2 4\n1 2 3\n3 4\n");
  REQUIRE(hg.num_edges() == 2);
  REQUIRE(hg.num_vertices() == 4);
  CHECK(std::ranges::equal(hg.pins(0), std::vector<VertexId>{0, 1, 2}));
  CHECK(std::ranges::equal(hg.pins(1), std::vector<VertexId>{2, 3}));
  CHECK(hg.edge_weight(0) == 1);
  CHECK(hg.vertex_weight(3) == 1);
}

TEST_CASE("hmetis weights and comments") {
  const Hypergraph w = parse_hmetis("2 4 1\n3 1 2 3\n1 3 4\n");
  CHECK(w.edge_weight(0) == 3);
  CHECK(w.edge_weight(1) == 1);

  const Hypergraph v = parse_hmetis("% header follows\n1 3 10\n1 2 3\n% weights\n4\n5\n6\n");
  CHECK(v.vertex_weight(0) == 4);
  CHECK(v.vertex_weight(2) == 6);
  CHECK(v.total_vertex_weight() == 15);

  const Hypergraph both = parse_hmetis("1 2 11\n7 1 2\n2\n3\n");
  CHECK(both.edge_weight(0) == 7);
  CHECK(both.vertex_weight(1) == 3);
}

TEST_CASE("hmetis errors carry kind and line") {
  std::size_t line = 0;
  CHECK(hmetis_error("1 2\n1 1\n", &line) == Kind::kDuplicatePin);
  CHECK(line == 2);
  CHECK(hmetis_error("1 2\n1 3\n", &line) == Kind::kPinOutOfRange);
  CHECK(line == 2);
  CHECK(hmetis_error("2 3\n1 2\n", &line) == Kind::kTruncated);
  CHECK(line == 3);
  CHECK(hmetis_error("1 2 1\n5\n") == Kind::kEmptyEdge);
  CHECK(hmetis_error("1 2 7\n1 2\n") == Kind::kBadFormat);
  CHECK(hmetis_error("") == Kind::kBadHeader);
  CHECK(hmetis_error("1\n") == Kind::kBadHeader);
  CHECK(hmetis_error("1 2\n1 x\n") == Kind::kBadToken);
  CHECK(hmetis_error("1 2\n1 2\n1 2\n") == Kind::kTrailingData);
  CHECK(hmetis_error("1 2 1\n0 1 2\n") == Kind::kNonPositiveWeight);
  CHECK(hmetis_error("1 2 10\n1 2\n1\n") == Kind::kTruncated);
}

TEST_CASE("hmetis parsing does not depend on stream chunking") {
  const Hypergraph original = testing::random_hypergraph(60, 90, 7, 4, true);
  const std::string text = to_hmetis(original);
  const Hypergraph whole = parse_hmetis(text);
  CHECK(same(whole, original));
  for (std::size_t chunk : {1, 2, 7, 64, 4096}) {
    ChunkedBuf buf(text, chunk);
    std::istream in(&buf);
    CHECK(same(parse_hmetis(in), whole));
  }
}

TEST_CASE("metis graphs") {
  const Hypergraph tri = parse_metis_graph("3 3\n2 3\n1 3\n1 2\n");
  CHECK(tri.num_edges() == 3);
  for (EdgeId e = 0; e < 3; ++e) CHECK(tri.edge_size(e) == 2);
  CHECK(std::ranges::equal(tri.pins(0), std::vector<VertexId>{0, 1}));

  const Hypergraph weighted = parse_metis_graph("3 2 001\n2 5\n1 5 3 7\n2 7\n");
  REQUIRE(weighted.num_edges() == 2);
  CHECK(weighted.edge_weight(0) == 5);
  CHECK(weighted.edge_weight(1) == 7);

  const Hypergraph vw = parse_metis_graph("2 1 11\n4 2 9\n6 1 9\n");
  CHECK(vw.vertex_weight(0) == 4);
  CHECK(vw.vertex_weight(1) == 6);
  CHECK(vw.edge_weight(0) == 9);

  const Hypergraph isolated = parse_metis_graph("3 1\n2\n1\n\n");
  CHECK(isolated.num_vertices() == 3);
  CHECK(isolated.degree(2) == 0);
}

TEST_CASE("metis errors") {
  CHECK(metis_error("2 1\n2\n\n") == Kind::kInconsistentAdjacency);
  CHECK(metis_error("2 1 001\n2 3\n1 4\n") == Kind::kInconsistentAdjacency);
  CHECK(metis_error("2 2\n2\n1\n") == Kind::kEdgeCountMismatch);
  CHECK(metis_error("2 1\n1\n\n") == Kind::kSelfLoop);
  CHECK(metis_error("2 1 100\n2\n1\n") == Kind::kBadFormat);
  CHECK(metis_error("2 1 0 2\n2\n1\n") == Kind::kBadFormat);
  CHECK(metis_error("3 1\n2\n1\n") == Kind::kTruncated);
  CHECK(metis_error("2 1\n3\n1\n") == Kind::kPinOutOfRange);
}

TEST_CASE("partition files") {
  const std::vector<BlockId> p{0, 0, 1, 1};
  CHECK(write_partition(p) == "0\n0\n1\n1\n");
  CHECK(parse_partition(write_partition(p)) == p);
  Rng rng(1);
  std::vector<BlockId> big(1000);
  for (auto& b : big) b = static_cast<BlockId>(rng.below(64));
  CHECK(parse_partition(write_partition(big)) == big);
}

TEST_CASE("partition hash is FNV-1a over little-endian block ids") {
  CHECK(partition_hash({}) == Fnv1a::kOffset);
  // Reference value computed byte by byte.
  std::uint64_t h = 14695981039346656037ULL;
  for (std::uint8_t byte : {0, 0, 0, 0, 1, 0, 0, 0}) {
    h ^= byte;
    h *= 1099511628211ULL;
  }
  CHECK(partition_hash(std::vector<BlockId>{0, 1}) == h);
  CHECK(hash_to_hex(0x1a) == "000000000000001a");
}

TEST_CASE("run records round-trip with sorted keys") {
  RunRecord r;
  r.instance = "toy.hgr";
  r.k = 8;
  r.epsilon = "0.03";
  r.seed = 42;
  r.threads = 4;
  r.preset = "detflows";
  r.times = {0.5, 0.25, 1.5, 0.75, 0.125};
  r.metric = 1234;
  r.imbalance = 0.0278;
  r.balanced = true;
  r.partition_hash = 0xdeadbeefcafef00dULL;
  r.phase_hashes = {{"coarsening", 1}, {"initial", 2}, {"jet/L0/t0", 3}};
  const std::string line = write_run_record(r);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(parse_run_record(line) == r);

  const auto j = nlohmann::json::parse(line);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(line.find("\"partition_hash\":\"deadbeefcafef00d\"") != std::string::npos);
  CHECK(line.rfind("{\"balanced\"", 0) == 0);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "detpart_io_test";
  std::filesystem::create_directories(dir);
  const auto hgr = (dir / "x.hgr").string();
  std::ofstream(hgr) << "2 4\n1 2 3\n3 4\n";
  CHECK(detect_format(hgr) == InputFormat::kHmetis);
  CHECK(detect_format("a.graph") == InputFormat::kMetis);
  CHECK(detect_format("a.metis") == InputFormat::kMetis);
  CHECK_THROWS_AS(detect_format("a.txt"), std::invalid_argument);
  CHECK(read_hypergraph_file(hgr, InputFormat::kHmetis).num_pins() == 5);
  CHECK_THROWS(read_hypergraph_file((dir / "missing.hgr").string(), InputFormat::kHmetis));

  const auto jsonl = (dir / "r.jsonl").string();
  std::filesystem::remove(jsonl);
  RunRecord r;
  r.instance = "a";
  append_run_record(jsonl, r);
  r.instance = "b";
  append_run_record(jsonl, r);
  std::ifstream in(jsonl);
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(parse_run_record(l1).instance == "a");
  CHECK(parse_run_record(l2).instance == "b");
  std::filesystem::remove_all(dir);
}
