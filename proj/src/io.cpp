#include "tvdeblur/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tvdeblur {

namespace {

constexpr char kMagic[8] = {'T', 'V', 'D', 'B', 'L', 'R', 'F', '1'};
constexpr uint32_t kVersion = 1;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

int next_pnm_token(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comments.
  for (;;) {
    int ch = in.peek();
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  int value;
  if (!(in >> value)) fail(path, "malformed PGM header");
  return value;
}

}  // namespace

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char p, five;
  in.get(p);
  in.get(five);
  if (p != 'P' || five != '5') fail(path, "not a binary PGM (P5)");
  const int w = next_pnm_token(in, path);
  const int h = next_pnm_token(in, path);
  const int maxval = next_pnm_token(in, path);
  if (w != h) fail(path, "image is not square (" + std::to_string(w) + "x" + std::to_string(h) + ")");
  if (w <= 0) fail(path, "empty image");
  if (maxval <= 0 || maxval > 255) fail(path, "unsupported maxval (8-bit only)");
  in.get();  // single whitespace before raster
  std::vector<unsigned char> raw(static_cast<size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) fail(path, "truncated raster");
  Image img(w);
  // PGM raster is row-major top-to-bottom; we store column-major.
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      img.at(r, c) = static_cast<double>(raw[static_cast<size_t>(r) * w + c]) / maxval;
  return img;
}

void write_pgm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "P5\n" << img.n << " " << img.n << "\n255\n";
  std::vector<unsigned char> raw(static_cast<size_t>(img.n) * img.n);
  for (int r = 0; r < img.n; ++r)
    for (int c = 0; c < img.n; ++c) {
      const double v = std::clamp(img.at(r, c), 0.0, 1.0);
      raw[static_cast<size_t>(r) * img.n + c] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) fail(path, "write failed");
}

void write_f64(const std::string& path, const F64Dump& dump) {
  if (dump.data.size() != static_cast<size_t>(dump.n) * dump.n * dump.n_saved)
    fail(path, "dump payload size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  uint32_t head[6] = {kVersion, dump.n, dump.n_saved, dump.chain_id, dump.thin, 0};
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(head), sizeof(head));
  out.write(reinterpret_cast<const char*>(dump.data.data()),
            static_cast<std::streamsize>(dump.data.size() * sizeof(double)));
  if (!out) fail(path, "write failed");
}

F64Dump read_f64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char magic[8];
  uint32_t head[6];
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(head), sizeof(head));
  if (!in || std::memcmp(magic, kMagic, 8) != 0) fail(path, "not a TVDBLRF1 dump");
  if (head[0] != kVersion) fail(path, "unsupported dump version");
  F64Dump dump;
  dump.n = head[1];
  dump.n_saved = head[2];
  dump.chain_id = head[3];
  dump.thin = head[4];
  dump.data.resize(static_cast<size_t>(dump.n) * dump.n * dump.n_saved);
  in.read(reinterpret_cast<char*>(dump.data.data()),
          static_cast<std::streamsize>(dump.data.size() * sizeof(double)));
  if (!in) fail(path, "truncated dump");
  return dump;
}

void write_f64_image(const std::string& path, const Image& img) {
  F64Dump dump;
  dump.n = static_cast<uint32_t>(img.n);
  dump.n_saved = 1;
  dump.data = img.data;
  write_f64(path, dump);
}

Image read_f64_image(const std::string& path) {
  F64Dump dump = read_f64(path);
  if (dump.n_saved != 1) fail(path, "expected a single-image dump");
  return Image(static_cast<int>(dump.n), std::move(dump.data));
}

Image read_image_any(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".f64") return read_f64_image(path);
  return read_pgm(path);
}

uint64_t fnv1a64(const void* data, size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << content;
  if (!out) fail(path, "write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tvdeblur
