#include "sykm/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace sykm {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'S', 'Y', 'K', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_blocks(std::ofstream& f, const std::vector<Mat8>& blocks) {
  for (const Mat8& b : blocks)
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        double re = b(r, c).real(), im = b(r, c).imag();
        f.write(reinterpret_cast<const char*>(&re), sizeof(double));
        f.write(reinterpret_cast<const char*>(&im), sizeof(double));
      }
}

void get_blocks(std::ifstream& f, std::vector<Mat8>& blocks) {
  for (Mat8& b : blocks)
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        double re = 0, im = 0;
        f.read(reinterpret_cast<char*>(&re), sizeof(double));
        f.read(reinterpret_cast<char*>(&im), sizeof(double));
        b(r, c) = cxd(re, im);
      }
}

}  // namespace

void write_checkpoint(const std::string& path, const std::string& header_json,
                      const EqualTimeGreens& g, const SelfEnergy& sigma) {
  nlohmann::json hdr = nlohmann::json::parse(header_json);
  hdr["layout"] = {{"sites", g.n_sites}, {"nt", g.nt}, {"block", 8}};
  std::string hs = hdr.dump();

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw io_error("cannot open checkpoint for writing: " + path);
  f.write(kMagic, 4);
  f.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  std::uint64_t len = hs.size();
  f.write(reinterpret_cast<const char*>(&len), sizeof(len));
  f.write(hs.data(), std::streamsize(hs.size()));
  put_blocks(f, g.blk);
  put_blocks(f, sigma.blk);
  if (!f) throw io_error("short write on checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open checkpoint: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw io_error("not a SYKM checkpoint: " + path);
  std::uint32_t version = 0;
  f.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kVersion) throw io_error("unsupported checkpoint version");
  std::uint64_t len = 0;
  f.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string hs(len, '\0');
  f.read(hs.data(), std::streamsize(len));
  nlohmann::json hdr = nlohmann::json::parse(hs);
  int sites = hdr.at("layout").at("sites").get<int>();
  int nt = hdr.at("layout").at("nt").get<int>();

  Checkpoint ck;
  ck.header_json = hs;
  ck.g = EqualTimeGreens::zeros(sites, nt);
  ck.sigma = SelfEnergy::zeros(sites, nt);
  get_blocks(f, ck.g.blk);
  get_blocks(f, ck.sigma.blk);
  if (!f) throw io_error("truncated checkpoint: " + path);
  return ck;
}

}  // namespace sykm
