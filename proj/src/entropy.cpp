#include "dicoss/entropy.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace dicoss {

namespace {

constexpr std::uint32_t kTopValue = 1u << 24;

class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<std::uint8_t>& out) : out_(out) {}

  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
    range_ /= total;
    low_ += static_cast<std::uint64_t>(cum) * range_;
    range_ *= freq;
    while (range_ < kTopValue) {
      shift_low();
      range_ <<= 8;
    }
  }

  void flush() {
    for (int i = 0; i < 5; ++i) shift_low();
  }

 private:
  void shift_low() {
    // low_ < 2^33 here; the high bit is the pending carry
    if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
      const std::uint8_t carry = static_cast<std::uint8_t>(low_ >> 32);
      std::uint8_t b = cache_;
      do {
        out_.push_back(static_cast<std::uint8_t>(b + carry));
        b = 0xFF;
      } while (--cache_size_ != 0);
      cache_ = static_cast<std::uint8_t>(low_ >> 24);
    }
    ++cache_size_;
    low_ = static_cast<std::uint32_t>(static_cast<std::uint32_t>(low_) << 8);
  }

  std::vector<std::uint8_t>& out_;
  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
};

class RangeDecoder {
 public:
  RangeDecoder(const std::uint8_t* p, std::size_t len) : p_(p), end_(p + len) {
    for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
  }

  std::uint32_t decode_freq(std::uint32_t total) {
    range_ /= total;
    std::uint32_t f = code_ / range_;
    return f < total ? f : total - 1;
  }

  void decode_update(std::uint32_t cum, std::uint32_t freq) {
    code_ -= cum * range_;
    range_ *= freq;
    while (range_ < kTopValue) {
      code_ = (code_ << 8) | next_byte();
      range_ <<= 8;
    }
  }

 private:
  std::uint8_t next_byte() {
    if (p_ >= end_) throw std::runtime_error("truncated-stream");
    return *p_++;
  }

  const std::uint8_t* p_;
  const std::uint8_t* end_;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

// Counts start at one (every symbol decodable from the first position) and
// grow by a step large enough that skewed inputs converge quickly.
class AdaptiveModel {
 public:
  explicit AdaptiveModel(std::uint32_t k) : freq_(k, 1), total_(k) {
    if (k < 2 || k > (1u << 20)) throw std::invalid_argument("alphabet size out of range");
    max_total_ = std::max(1u << 16, 8 * k);
  }

  std::uint32_t total() const { return total_; }

  std::uint32_t cum_below(std::uint32_t s) const {
    std::uint32_t c = 0;
    for (std::uint32_t t = 0; t < s; ++t) c += freq_[t];
    return c;
  }

  std::uint32_t freq(std::uint32_t s) const { return freq_[s]; }

  std::uint32_t find(std::uint32_t target, std::uint32_t& cum_out) const {
    std::uint32_t c = 0, s = 0;
    while (c + freq_[s] <= target) c += freq_[s++];
    cum_out = c;
    return s;
  }

  void update(std::uint32_t s) {
    freq_[s] += kIncrement;
    total_ += kIncrement;
    if (total_ >= max_total_) rescale();
  }

 private:
  static constexpr std::uint32_t kIncrement = 32;

  void rescale() {
    total_ = 0;
    for (auto& f : freq_) {
      f = (f + 1) >> 1;
      total_ += f;
    }
  }

  std::vector<std::uint32_t> freq_;
  std::uint32_t total_;
  std::uint32_t max_total_;
};

}  // namespace

Bitstream entropy_encode(std::span<const std::int32_t> symbols, const SymbolAlphabet& alphabet) {
  Bitstream bs;
  if (symbols.empty()) return bs;
  AdaptiveModel model(alphabet.size);
  RangeEncoder enc(bs.bytes);
  for (std::int32_t s : symbols) {
    if (s < 0 || static_cast<std::uint32_t>(s) >= alphabet.size)
      throw std::invalid_argument("entropy_encode: symbol out of range");
    const auto u = static_cast<std::uint32_t>(s);
    enc.encode(model.cum_below(u), model.freq(u), model.total());
    model.update(u);
  }
  enc.flush();
  bs.bit_length = 8 * bs.bytes.size();
  return bs;
}

std::vector<std::int32_t> entropy_decode(const Bitstream& bs, std::size_t count,
                                         const SymbolAlphabet& alphabet) {
  std::vector<std::int32_t> out;
  if (count == 0) return out;
  out.reserve(count);
  AdaptiveModel model(alphabet.size);
  RangeDecoder dec(bs.bytes.data(), bs.bytes.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t cum = 0;
    const std::uint32_t target = dec.decode_freq(model.total());
    const std::uint32_t s = model.find(target, cum);
    dec.decode_update(cum, model.freq(s));
    model.update(s);
    out.push_back(static_cast<std::int32_t>(s));
  }
  return out;
}

double empirical_entropy(std::span<const std::int32_t> symbols, const SymbolAlphabet& alphabet) {
  if (symbols.empty()) throw std::invalid_argument("empirical_entropy: empty input");
  std::vector<std::size_t> counts(alphabet.size, 0);
  for (std::int32_t s : symbols) {
    if (s < 0 || static_cast<std::uint32_t>(s) >= alphabet.size)
      throw std::invalid_argument("empirical_entropy: symbol out of range");
    ++counts[static_cast<std::size_t>(s)];
  }
  const double n = static_cast<double>(symbols.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double conditional_entropy(std::span<const std::int32_t> symbols,
                           std::span<const std::int32_t> side, const SymbolAlphabet& alphabet) {
  if (symbols.size() != side.size())
    throw std::invalid_argument("conditional_entropy: length mismatch");
  if (symbols.empty()) throw std::invalid_argument("conditional_entropy: empty input");
  std::unordered_map<std::uint64_t, std::size_t> joint;
  std::unordered_map<std::uint32_t, std::size_t> marg;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const std::int32_t s = symbols[i], t = side[i];
    if (s < 0 || static_cast<std::uint32_t>(s) >= alphabet.size || t < 0 ||
        static_cast<std::uint32_t>(t) >= alphabet.size)
      throw std::invalid_argument("conditional_entropy: symbol out of range");
    ++joint[(static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint32_t>(t)];
    ++marg[static_cast<std::uint32_t>(t)];
  }
  const double n = static_cast<double>(symbols.size());
  double h_joint = 0.0, h_side = 0.0;
  for (const auto& [k, c] : joint) {
    const double p = static_cast<double>(c) / n;
    h_joint -= p * std::log2(p);
  }
  for (const auto& [k, c] : marg) {
    const double p = static_cast<double>(c) / n;
    h_side -= p * std::log2(p);
  }
  return std::max(0.0, h_joint - h_side);
}

}  // namespace dicoss
