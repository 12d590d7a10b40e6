#include "airink/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "airink/error.hpp"

namespace airink {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint buffers are written in native order and must be little-endian");

constexpr std::array<char, 8> kMagic = {'A', 'I', 'R', 'I', 'N', 'K', 'C', 'K'};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json header;
  header["format"] = "airink-checkpoint";
  header["version"] = Checkpoint::kFormatVersion;
  header["metadata"] = ckpt.metadata;
  auto& tensors = header["tensors"];
  tensors = nlohmann::json::array();
  for (std::size_t i = 0; i < ckpt.parameters.size(); ++i) {
    tensors.push_back({{"name", ckpt.parameters.name(i)},
                       {"shape", ckpt.parameters[i].shape()}});
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  const std::uint64_t n = text.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& t : ckpt.parameters.tensors()) {
    out.write(reinterpret_cast<const char*>(t.data().data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ParseError(path.string() + ": not an airink checkpoint");
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n > (1u << 30)) throw ParseError(path.string() + ": bad header length");
  std::string text(n, '\0');
  in.read(text.data(), static_cast<std::streamsize>(n));
  if (!in) throw ParseError(path.string() + ": truncated header");

  Checkpoint ckpt;
  try {
    const auto header = nlohmann::json::parse(text);
    if (header.at("version").get<int>() != Checkpoint::kFormatVersion) {
      throw ParseError(path.string() + ": unsupported checkpoint version");
    }
    ckpt.metadata = header.at("metadata").get<std::map<std::string, std::string>>();
    for (const auto& entry : header.at("tensors")) {
      Tensor t(entry.at("shape").get<Shape>());
      in.read(reinterpret_cast<char*>(t.data().data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
      if (!in) throw ParseError(path.string() + ": truncated tensor data");
      ckpt.parameters.add(entry.at("name").get<std::string>(), std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed header: " + e.what());
  }
  return ckpt;
}

}  // namespace airink
