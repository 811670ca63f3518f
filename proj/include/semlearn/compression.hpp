// Skill-index codec over synthetic texts with a lossless fallback, and the
// analytic expected-bit-cost estimator.
//
// Stream layout (bit-exact, MSB-first within bytes):
//   [1 bit flag]
//   flag=1: [16-bit count][count x W-bit skill indices],
//           W = ceil(log2(#learned)) (0 when #learned <= 1)
//   flag=0: [32-bit raw byte length][raw bytes]
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semlearn/learners.hpp"

namespace semlearn {

struct CodecConfig {
  std::uint64_t num_skills = 0;  // |S|
  double c = 0.0;
  double R = 0.0;
  SuccessProfile profile = SuccessProfile::one_skill();
  double lossless_bits_per_text = 236.4;  // z
};

struct ExpectedBitsResult {
  double bits = 0.0;
  // Set when fewer than 2 skills are learned (index width undefined); the
  // estimate is then the pure lossless fallback z.
  bool degenerate = false;
  double zeta = 0.0;
  double understood_prob = 0.0;
};

// (1-eps) c log2(|S| zeta) + eps z, with p from density evolution.
ExpectedBitsResult expected_bits(const CodecConfig& cfg);

// Dense index table over the learned skills of a completed peeling run.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::span<const std::uint8_t> learned);

  std::uint64_t size() const { return index_to_skill_.size(); }
  int index_width() const;  // ceil(log2(size)), 0 when size <= 1
  std::optional<std::uint32_t> index_of(std::uint32_t skill) const;
  std::uint32_t skill_at(std::uint32_t index) const;

 private:
  std::vector<std::uint32_t> index_to_skill_;
  std::vector<std::uint32_t> skill_to_index_;  // npos when unlearned
};

struct Bitstream {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_count = 0;
  // Payload is the stream minus framing: index bits on the semantic path,
  // raw-text bits on the fallback path.
  std::uint64_t payload_bits = 0;
  bool semantic = false;
};

// Canonical token rendering of a synthetic text ("s<id> s<id> ..."); the
// fallback path stores exactly these bytes.
std::string render_raw_text(std::span<const std::uint32_t> skills);

// skills must be a set (strictly increasing). Texts whose skills are all in
// the catalog take the semantic path; everything else falls back to the raw
// rendering.
Bitstream encode_text(std::span<const std::uint32_t> skills,
                      const Catalog& catalog);

struct DecodedText {
  bool semantic = false;
  std::vector<std::uint32_t> skills;  // semantic path, sorted
  std::string raw;                    // fallback path
};

// Exact inverse of encode_text; throws std::invalid_argument on malformed
// streams or out-of-range indices.
DecodedText decode_text(const Bitstream& bits, const Catalog& catalog);

struct CorpusStats {
  std::uint64_t texts = 0;
  std::uint64_t semantic_texts = 0;
  double understood_fraction = 0.0;
  double mean_total_bits = 0.0;    // full stream incl. framing
  double mean_payload_bits = 0.0;  // index bits resp. raw bits
  double mean_raw_bits_fallback = 0.0;  // mean raw payload among fallbacks
  double mean_framing_bits = 0.0;
};

// Encodes `texts` fresh texts sampled per (A1)/(A2) against the catalog and
// aggregates the measured costs.
CorpusStats measure_corpus(const Catalog& catalog, std::uint32_t num_skills,
                           double c, std::uint64_t seed, std::uint64_t texts);

}  // namespace semlearn
