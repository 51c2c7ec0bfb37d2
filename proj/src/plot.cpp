#include "entnet/plot.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace entnet {
namespace {

std::uint32_t crc32_of(const unsigned char* data, std::size_t n, std::uint32_t seed = 0) {
  return static_cast<std::uint32_t>(::crc32(seed, data, static_cast<uInt>(n)));
}

void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v >> 24));
  s.push_back(static_cast<char>(v >> 16));
  s.push_back(static_cast<char>(v >> 8));
  s.push_back(static_cast<char>(v));
}

void chunk(std::string& out, const char type[4], const std::string& payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  out += body;
  put_u32(out, crc32_of(reinterpret_cast<const unsigned char*>(body.data()), body.size()));
}

void write_png(const std::string& path, int w, int h,
               const std::vector<unsigned char>& rgb) {
  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(w));
  put_u32(ihdr, static_cast<std::uint32_t>(h));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB
  chunk(png, "IHDR", ihdr);

  std::string raw;
  raw.reserve(static_cast<std::size_t>(h) * (3 * w + 1));
  for (int y = 0; y < h; ++y) {
    raw.push_back('\0');  // filter: none
    raw.append(reinterpret_cast<const char*>(rgb.data() + static_cast<std::size_t>(y) * w * 3),
               static_cast<std::size_t>(w) * 3);
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::string z(zlen, '\0');
  if (compress2(reinterpret_cast<Bytef*>(z.data()), &zlen,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                9) != Z_OK)
    throw std::runtime_error("png: deflate failed");
  z.resize(zlen);
  chunk(png, "IDAT", z);
  chunk(png, "IEND", "");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open plot for writing: " + path);
  out.write(png.data(), static_cast<std::streamsize>(png.size()));
}

struct Canvas {
  int w, h;
  std::vector<unsigned char> rgb;
  Canvas(int w_, int h_) : w(w_), h(h_), rgb(static_cast<std::size_t>(w_) * h_ * 3, 255) {}
  void set(int x, int y, unsigned char r, unsigned char g, unsigned char b) {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }
  void line(int x0, int y0, int x1, int y1, unsigned char r, unsigned char g,
            unsigned char b) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      set(x0, y0, r, g, b);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }
};

}  // namespace

void write_loglog_png(const std::string& path, const std::vector<PlotSeries>& series,
                      int width, int height) {
  Canvas cv(width, height);
  const int m = 40;  // margin
  cv.line(m, m, m, height - m, 0, 0, 0);
  cv.line(m, height - m, width - m, height - m, 0, 0, 0);

  double lx0 = 0, lx1 = 0, ly0 = 0, ly1 = 0;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      const double lx = std::log10(s.x[i]), ly = std::log10(s.y[i]);
      if (first) {
        lx0 = lx1 = lx;
        ly0 = ly1 = ly;
        first = false;
      }
      lx0 = std::min(lx0, lx);
      lx1 = std::max(lx1, lx);
      ly0 = std::min(ly0, ly);
      ly1 = std::max(ly1, ly);
    }
  if (first) {
    write_png(path, width, height, cv.rgb);
    return;
  }
  if (lx1 - lx0 < 1e-12) lx1 = lx0 + 1;
  if (ly1 - ly0 < 1e-12) ly1 = ly0 + 1;
  auto px = [&](double lx) {
    return m + static_cast<int>((lx - lx0) / (lx1 - lx0) * (width - 2 * m));
  };
  auto py = [&](double ly) {
    return height - m - static_cast<int>((ly - ly0) / (ly1 - ly0) * (height - 2 * m));
  };
  for (const auto& s : series) {
    int prevx = 0, prevy = 0;
    bool have_prev = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      const int x = px(std::log10(s.x[i])), y = py(std::log10(s.y[i]));
      for (int dx = -2; dx <= 2; ++dx)
        for (int dy = -2; dy <= 2; ++dy)
          if (dx * dx + dy * dy <= 4) cv.set(x + dx, y + dy, s.r, s.g, s.b);
      if (have_prev) cv.line(prevx, prevy, x, y, s.r, s.g, s.b);
      prevx = x;
      prevy = y;
      have_prev = true;
    }
  }
  write_png(path, width, height, cv.rgb);
}

}  // namespace entnet
