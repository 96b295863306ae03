#include "colorref/speaker/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <zlib.h>

#include "colorref/resources.hpp"

namespace colorref::speaker {

namespace {

constexpr std::string_view kMagic = "CRSPKCKP";

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(std::string_view in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[at + static_cast<std::size_t>(i)]);
  return v;
}

std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[at + static_cast<std::size_t>(i)]);
  return v;
}

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void put_f32(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
  put_u32(out, bits);
}

}  // namespace

std::string serialize_checkpoint(const SpeakerModel& model) {
  std::string payload;
  nlohmann::json directory = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto* p : model.parameters()) {
    directory.push_back({{"name", p->name}, {"shape", p->value.shape()}, {"offset", offset}, {"length", p->value.size()}});
    for (double v : p->value.data()) put_f32(payload, v);
    offset += p->value.size();
  }
  const auto& vocab = model.vocabulary();
  nlohmann::json manifest = {{"format_version", kCheckpointVersion},
                             {"hyperparameters", to_json(model.config())},
                             {"vocabulary", vocab.tokens()},
                             {"counts", vocab.counts()},
                             {"min_count", vocab.min_count()},
                             {"tensors", directory}};
  const std::string text = manifest.dump();
  std::string out(kMagic);
  put_u64(out, text.size());
  out += text;
  out += payload;
  put_u32(out, crc32_of(payload));
  return out;
}

SpeakerModel deserialize_checkpoint(std::string_view bytes) {
  const std::size_t header = kMagic.size() + 8;
  if (bytes.size() < header || bytes.substr(0, kMagic.size()) != kMagic) {
    if (bytes.size() >= kMagic.size() && bytes.substr(0, kMagic.size()) != kMagic) {
      throw DataError("not a speaker checkpoint (bad magic)");
    }
    throw ChecksumError("checkpoint truncated: header incomplete");
  }
  const std::uint64_t manifest_len = get_u64(bytes, kMagic.size());
  if (manifest_len > bytes.size() - header) throw ChecksumError("checkpoint truncated inside the manifest");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.substr(header, manifest_len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint manifest is not valid JSON: ") + e.what());
  }
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw DataError("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
    }
    const auto& tensors = manifest.at("tensors");
    std::size_t total = 0;
    for (const auto& t : tensors) total += t.at("length").get<std::size_t>();
    const std::size_t payload_at = header + manifest_len;
    if (bytes.size() != payload_at + 4 * total + 4) {
      throw ChecksumError("checkpoint checksum failure: file size does not match the manifest (truncated or padded)");
    }
    const auto payload = bytes.substr(payload_at, 4 * total);
    if (crc32_of(payload) != get_u32(bytes, payload_at + 4 * total)) {
      throw ChecksumError("checkpoint checksum failure: payload CRC-32 mismatch");
    }

    auto cfg = training_config_from_json(manifest.at("hyperparameters"));
    auto vocab = corpus::Vocabulary::from_tokens(manifest.at("vocabulary").get<std::vector<std::string>>(),
                                                 manifest.at("counts").get<std::vector<std::uint64_t>>(),
                                                 manifest.at("min_count").get<int>());
    SpeakerModel model(std::move(vocab), cfg);
    auto params = model.parameters();
    if (tensors.size() != params.size()) throw DataError("checkpoint tensor count does not match the model");
    for (std::size_t k = 0; k < params.size(); ++k) {
      const auto& t = tensors[k];
      auto* p = params[k];
      if (t.at("name").get<std::string>() != p->name || t.at("shape").get<nn::Shape>() != p->value.shape()) {
        throw DataError("checkpoint tensor '" + t.at("name").get<std::string>() + "' does not match model tensor '" +
                        p->name + "' " + nn::to_string(p->value.shape()));
      }
      const auto offset = t.at("offset").get<std::size_t>();
      const auto length = t.at("length").get<std::size_t>();
      if (length != p->value.size() || offset + length > total) throw DataError("checkpoint tensor directory is inconsistent");
      for (std::size_t i = 0; i < length; ++i) {
        p->value[i] = static_cast<double>(std::bit_cast<float>(get_u32(payload, 4 * (offset + i))));
      }
      p->zero_grad();
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint manifest is malformed: ") + e.what());
  }
}

void save_checkpoint(const SpeakerModel& model, const std::string& path) {
  const auto bytes = serialize_checkpoint(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint '" + path + "'");
}

SpeakerModel load_checkpoint(const std::string& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace colorref::speaker
