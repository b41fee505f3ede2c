#pragma once

#include "isoperc/isoradial.hpp"
#include "isoperc/tiling.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace isoperc {

inline constexpr int kFormatVersion = 1;

/// 64-bit FNV-1a, rendered as 16 hex digits.
class ContentHasher {
public:
    void bytes(const void* data, std::size_t n) noexcept;
    void text(std::string_view s) noexcept { bytes(s.data(), s.size()); }
    template <class T>
    void value(const T& v) noexcept { bytes(&v, sizeof v); }
    std::uint64_t digest() const noexcept { return h_; }
    std::string hex() const;

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string content_hash(const RhombicTiling& tiling);
std::string content_hash(const IsoradialGraph& g);
std::string content_hash(const EdgeWeights& w);
std::string content_hash(std::string_view text);

/// Versioned JSON documents. Readers throw Error(Format) on malformed input.
std::string tiling_to_json(const RhombicTiling& tiling);
RhombicTiling tiling_from_json(std::string_view text);

std::string graph_to_json(const IsoradialGraph& g, const std::vector<EdgeWeights>& weights = {});
/// The graph comes back without a source tiling; weight tables, if any, are
/// appended to `weights`.
IsoradialGraph graph_from_json(std::string_view text, std::vector<EdgeWeights>* weights = nullptr);

} // namespace isoperc
