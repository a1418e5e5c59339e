#include "roadrecon/util/raster.h"

#include <fstream>
#include <sstream>

#include "roadrecon/errors.h"

namespace roadrecon {
namespace {

// Neighbours P2..P9 clockwise starting north, as (dcol, drow).
constexpr std::array<std::pair<int, int>, 8> kRing = {{
    {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

bool MarkedForRemoval(const GrayImage& img, int c, int r, bool first_pass) {
  std::array<int, 8> p{};
  int b = 0;
  for (size_t k = 0; k < kRing.size(); ++k) {
    p[k] = img.get(c + kRing[k].first, r + kRing[k].second) != 0 ? 1 : 0;
    b += p[k];
  }
  if (b < 2 || b > 6) return false;
  int a = 0;
  for (size_t k = 0; k < 8; ++k) {
    if (p[k] == 0 && p[(k + 1) % 8] == 1) ++a;
  }
  if (a != 1) return false;
  // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W).
  if (first_pass) {
    return p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0;
  }
  return p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0;
}

void ReadHeaderToken(std::istream& in, std::string* token) {
  while (true) {
    in >> std::ws;
    if (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    in >> *token;
    return;
  }
}

std::ifstream OpenPnm(const std::string& path, const std::string& magic, int* width,
                      int* height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string token;
  ReadHeaderToken(in, &token);
  if (token != magic) throw ParseError(path + ": expected " + magic + " header");
  std::string w, h, maxval;
  ReadHeaderToken(in, &w);
  ReadHeaderToken(in, &h);
  ReadHeaderToken(in, &maxval);
  try {
    *width = std::stoi(w);
    *height = std::stoi(h);
    if (std::stoi(maxval) != 255) throw ParseError(path + ": max value must be 255");
  } catch (const std::logic_error&) {
    throw ParseError(path + ": malformed header");
  }
  if (*width <= 0 || *height <= 0) throw ParseError(path + ": bad image size");
  in.get();  // single whitespace after max value
  return in;
}

}  // namespace

GrayImage ZhangSuenThin(const GrayImage& mask) {
  GrayImage img(mask.width(), mask.height(), 0);
  for (size_t i = 0; i < mask.data().size(); ++i) {
    img.data()[i] = mask.data()[i] != 0 ? 1 : 0;
  }
  std::vector<std::pair<int, int>> to_remove;
  bool changed = true;
  while (changed) {
    changed = false;
    for (bool first_pass : {true, false}) {
      to_remove.clear();
      for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
          if (img.at(c, r) != 0 && MarkedForRemoval(img, c, r, first_pass)) {
            to_remove.emplace_back(c, r);
          }
        }
      }
      for (const auto& [c, r] : to_remove) img.at(c, r) = 0;
      changed = changed || !to_remove.empty();
    }
  }
  return img;
}

PixelSet ForegroundPixels(const GrayImage& mask) {
  PixelSet out;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask.at(c, r) != 0) out.emplace_back(c, r);
    }
  }
  return out;
}

void WritePgm(const std::string& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data().data()),
            static_cast<std::streamsize>(image.data().size()));
  if (!out) throw IoError("failed writing " + path);
}

GrayImage ReadPgm(const std::string& path) {
  int width = 0, height = 0;
  std::ifstream in = OpenPnm(path, "P5", &width, &height);
  GrayImage image(width, height);
  in.read(reinterpret_cast<char*>(image.data().data()),
          static_cast<std::streamsize>(image.data().size()));
  if (!in) throw ParseError(path + ": truncated pixel data");
  return image;
}

void WritePpm(const std::string& path, const RgbImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P6\n" << image.width() << " " << image.height() << "\n255\n";
  for (const auto& px : image.data()) {
    out.write(reinterpret_cast<const char*>(px.data()), 3);
  }
  if (!out) throw IoError("failed writing " + path);
}

RgbImage ReadPpm(const std::string& path) {
  int width = 0, height = 0;
  std::ifstream in = OpenPnm(path, "P6", &width, &height);
  RgbImage image(width, height);
  for (auto& px : image.data()) {
    in.read(reinterpret_cast<char*>(px.data()), 3);
  }
  if (!in) throw ParseError(path + ": truncated pixel data");
  return image;
}

}  // namespace roadrecon
