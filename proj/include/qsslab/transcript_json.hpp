#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qsslab/protocol.hpp"

namespace qsslab::protocol {

nlohmann::ordered_json to_json(const Transcript& transcript);
Transcript transcript_from_json(const nlohmann::json& j);

/// Pretty-printed, deterministic text.
std::string transcript_text(const Transcript& transcript);
Transcript parse_transcript(std::string_view text);

/// Writes `path`; when the text exceeds `gzip_threshold` bytes it is gzipped
/// and ".gz" is appended unless already present. Returns the path written.
std::filesystem::path write_transcript(const Transcript& transcript, std::filesystem::path path,
                                       std::size_t gzip_threshold = 10u << 20);
/// Reads plain or gzipped transcripts.
Transcript read_transcript(const std::filesystem::path& path);

}  // namespace qsslab::protocol
