#pragma once

#include <string>

#include "colorref/error.hpp"
#include "colorref/speaker/model.hpp"

namespace colorref::speaker {

inline constexpr int kCheckpointVersion = 1;

/// Payload CRC mismatch, or a file too short for its own manifest.
class ChecksumError : public DataError {
 public:
  using DataError::DataError;
};

/// Layout: 8-byte magic "CRSPKCKP", u64 LE manifest length, UTF-8 JSON
/// manifest, float32 LE tensor payload, u32 LE CRC-32 of the payload.
/// The manifest holds format_version, the TrainingConfig, the vocabulary in
/// id order with counts, and a tensor directory (name, shape, offset, length
/// in floats).
std::string serialize_checkpoint(const SpeakerModel& model);
SpeakerModel deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const SpeakerModel& model, const std::string& path);
SpeakerModel load_checkpoint(const std::string& path);

}  // namespace colorref::speaker
