#include "semlearn/compression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "semlearn/density_evolution.hpp"
#include "semlearn/graph_model.hpp"

namespace semlearn {

namespace {

constexpr std::uint32_t kNoIndex = 0xffffffffu;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

class BitWriter {
 public:
  void put(std::uint64_t value, int bits) {
    for (int b = bits - 1; b >= 0; --b) push_bit((value >> b) & 1u);
  }
  Bitstream take() {
    Bitstream s;
    s.bytes = std::move(bytes_);
    s.bit_count = count_;
    return s;
  }

 private:
  void push_bit(std::uint64_t bit) {
    if (count_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (count_ % 8));
    ++count_;
  }
  std::vector<std::uint8_t> bytes_;
  std::uint64_t count_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const Bitstream& s) : s_(s) {}
  std::uint64_t get(int bits) {
    std::uint64_t v = 0;
    for (int b = 0; b < bits; ++b) {
      if (pos_ >= s_.bit_count)
        throw std::invalid_argument("bitstream truncated");
      std::uint8_t byte = s_.bytes[pos_ / 8];
      v = (v << 1) | ((byte >> (7 - pos_ % 8)) & 1u);
      ++pos_;
    }
    return v;
  }

 private:
  const Bitstream& s_;
  std::uint64_t pos_ = 0;
};

}  // namespace

ExpectedBitsResult expected_bits(const CodecConfig& cfg) {
  require(cfg.num_skills >= 1, "num_skills must be >= 1");
  require(std::isfinite(cfg.c) && cfg.c >= 0, "c must be >= 0");
  require(std::isfinite(cfg.R) && cfg.R >= 0, "R must be >= 0");
  require(std::isfinite(cfg.lossless_bits_per_text) &&
              cfg.lossless_bits_per_text >= 0,
          "z must be >= 0");

  DEResult de = de_solve_single(cfg.c, cfg.R, cfg.profile);
  ExpectedBitsResult out;
  out.zeta = de.zeta1();
  out.understood_prob = 1.0 - de.epsilon;
  const double learned = out.zeta * static_cast<double>(cfg.num_skills);
  if (learned < 2.0) {
    out.degenerate = true;
    out.bits = cfg.lossless_bits_per_text;
    return out;
  }
  out.bits = out.understood_prob * cfg.c * std::log2(learned) +
             (1.0 - out.understood_prob) * cfg.lossless_bits_per_text;
  return out;
}

Catalog::Catalog(std::span<const std::uint8_t> learned) {
  skill_to_index_.assign(learned.size(), kNoIndex);
  for (std::uint32_t s = 0; s < learned.size(); ++s) {
    if (learned[s]) {
      skill_to_index_[s] = static_cast<std::uint32_t>(index_to_skill_.size());
      index_to_skill_.push_back(s);
    }
  }
}

int Catalog::index_width() const {
  if (index_to_skill_.size() <= 1) return 0;
  return static_cast<int>(
      std::ceil(std::log2(static_cast<double>(index_to_skill_.size()))));
}

std::optional<std::uint32_t> Catalog::index_of(std::uint32_t skill) const {
  if (skill >= skill_to_index_.size() || skill_to_index_[skill] == kNoIndex)
    return std::nullopt;
  return skill_to_index_[skill];
}

std::uint32_t Catalog::skill_at(std::uint32_t index) const {
  if (index >= index_to_skill_.size())
    throw std::invalid_argument("catalog index out of range");
  return index_to_skill_[index];
}

std::string render_raw_text(std::span<const std::uint32_t> skills) {
  std::string s;
  for (std::size_t i = 0; i < skills.size(); ++i) {
    if (i) s += ' ';
    s += 's';
    s += std::to_string(skills[i]);
  }
  return s;
}

Bitstream encode_text(std::span<const std::uint32_t> skills,
                      const Catalog& catalog) {
  for (std::size_t i = 1; i < skills.size(); ++i)
    require(skills[i] > skills[i - 1], "text skills must be a sorted set");
  require(skills.size() < 65536, "semantic count field is 16 bits");

  bool all_learned = true;
  for (auto s : skills) all_learned = all_learned && catalog.index_of(s);

  BitWriter w;
  Bitstream out;
  if (all_learned) {
    const int width = catalog.index_width();
    w.put(1, 1);
    w.put(skills.size(), 16);
    for (auto s : skills) w.put(*catalog.index_of(s), width);
    out = w.take();
    out.semantic = true;
    out.payload_bits = static_cast<std::uint64_t>(width) * skills.size();
  } else {
    std::string raw = render_raw_text(skills);
    w.put(0, 1);
    w.put(raw.size(), 32);
    for (unsigned char ch : raw) w.put(ch, 8);
    out = w.take();
    out.semantic = false;
    out.payload_bits = 8ull * raw.size();
  }
  return out;
}

DecodedText decode_text(const Bitstream& bits, const Catalog& catalog) {
  BitReader r(bits);
  DecodedText out;
  out.semantic = r.get(1) == 1;
  if (out.semantic) {
    auto count = r.get(16);
    const int width = catalog.index_width();
    for (std::uint64_t i = 0; i < count; ++i) {
      auto idx = static_cast<std::uint32_t>(r.get(width));
      out.skills.push_back(catalog.skill_at(idx));
    }
    std::sort(out.skills.begin(), out.skills.end());
    out.skills.erase(std::unique(out.skills.begin(), out.skills.end()),
                     out.skills.end());
  } else {
    auto len = r.get(32);
    out.raw.reserve(len);
    for (std::uint64_t i = 0; i < len; ++i)
      out.raw += static_cast<char>(r.get(8));
  }
  return out;
}

CorpusStats measure_corpus(const Catalog& catalog, std::uint32_t num_skills,
                           double c, std::uint64_t seed, std::uint64_t texts) {
  require(texts >= 1, "corpus must have at least one text");
  CorpusStats st;
  st.texts = texts;
  std::uint64_t total = 0, payload = 0, raw_payload = 0, framing = 0;
  for (std::uint64_t i = 0; i < texts; ++i) {
    auto text = sample_test_text(num_skills, c, seed, i);
    Bitstream bits = encode_text(text, catalog);
    total += bits.bit_count;
    payload += bits.payload_bits;
    framing += bits.bit_count - bits.payload_bits;
    if (bits.semantic) {
      ++st.semantic_texts;
    } else {
      raw_payload += bits.payload_bits;
    }
  }
  const auto n = static_cast<double>(texts);
  st.understood_fraction = static_cast<double>(st.semantic_texts) / n;
  st.mean_total_bits = static_cast<double>(total) / n;
  st.mean_payload_bits = static_cast<double>(payload) / n;
  st.mean_framing_bits = static_cast<double>(framing) / n;
  const std::uint64_t fallbacks = texts - st.semantic_texts;
  st.mean_raw_bits_fallback =
      fallbacks == 0 ? 0.0 : static_cast<double>(raw_payload) / fallbacks;
  return st;
}

}  // namespace semlearn
