/*
 * Copyright (c) 2026, The VanishKit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <vanishkit/image.hpp>

#include <jpeglib.h>
#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace vanishkit {

namespace detail {

struct FileCloser
{
  void operator()(std::FILE* f) const
  {
    if (f)
      std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline float luma(float r, float g, float b)
{
  return 0.299f * r + 0.587f * g + 0.114f * b;
}

inline Image load_png(std::FILE* fp, const std::string& path)
{
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png)
    throw std::runtime_error(path + ": failed to initialize PNG reader");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error(path + ": failed to initialize PNG reader");
  }
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": corrupt PNG data");
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  // Normalize every color layout to 8-bit RGBA, then convert to luma.
  png_set_expand(png);
  if (png_get_bit_depth(png, info) == 16)
    png_set_strip_16(png);
  const png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_add_alpha(png, 0xFF, PNG_FILLER_AFTER);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  buffer.resize(static_cast<std::size_t>(w) * h * 4);
  rows.resize(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y)
    rows[static_cast<std::size_t>(y)] = buffer.data() + static_cast<std::size_t>(y) * w * 4;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    const png_byte* row = buffer.data() + static_cast<std::size_t>(y) * w * 4;
    for (int x = 0; x < w; ++x) {
      const float r = row[4 * x + 0] / 255.0f;
      const float g = row[4 * x + 1] / 255.0f;
      const float b = row[4 * x + 2] / 255.0f;
      img.at(x, y) = luma(r, g, b);
    }
  }
  return img;
}

struct JpegErrorMgr
{
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

inline void jpeg_error_exit(j_common_ptr cinfo)
{
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

inline Image load_jpeg(std::FILE* fp, const std::string& path)
{
  jpeg_decompress_struct cinfo;
  JpegErrorMgr jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error(path + ": corrupt JPEG data");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, fp);
  jpeg_read_header(&cinfo, TRUE);
  jpeg_start_decompress(&cinfo);

  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  const int ch = cinfo.output_components;
  Image img(w, h);
  std::vector<JSAMPLE> row(static_cast<std::size_t>(w) * ch);
  JSAMPROW rowp = row.data();
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    jpeg_read_scanlines(&cinfo, &rowp, 1);
    for (int x = 0; x < w; ++x) {
      if (ch >= 3) {
        img.at(x, y) = luma(row[static_cast<std::size_t>(ch) * x + 0] / 255.0f,
                            row[static_cast<std::size_t>(ch) * x + 1] / 255.0f,
                            row[static_cast<std::size_t>(ch) * x + 2] / 255.0f);
      } else {
        img.at(x, y) = row[static_cast<std::size_t>(x) * ch] / 255.0f;
      }
    }
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

}  // namespace detail

/// Loads a PNG or JPEG image (format detected from magic bytes) and converts
/// it to single-channel luma in [0, 1]. Throws std::runtime_error on missing
/// files, unknown formats, or corrupt data.
inline Image load_image(const std::string& path)
{
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp)
    throw std::runtime_error(path + ": cannot open file");
  unsigned char magic[2] = {0, 0};
  if (std::fread(magic, 1, 2, fp.get()) != 2)
    throw std::runtime_error(path + ": cannot read file header");
  std::rewind(fp.get());
  if (magic[0] == 0x89 && magic[1] == 'P')
    return detail::load_png(fp.get(), path);
  if (magic[0] == 0xFF && magic[1] == 0xD8)
    return detail::load_jpeg(fp.get(), path);
  throw std::runtime_error(path + ": unsupported image format (expected PNG or JPEG)");
}

/// Writes an image as 8-bit grayscale PNG; values are clamped to [0, 1].
inline void write_png(const Image& img, const std::string& path)
{
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("write_png: empty image");
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp)
    throw std::runtime_error(path + ": cannot open file for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png)
    throw std::runtime_error(path + ": failed to initialize PNG writer");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error(path + ": failed to initialize PNG writer");
  }
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error(path + ": PNG write failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  buffer.resize(static_cast<std::size_t>(img.width) * img.height);
  rows.resize(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    rows[static_cast<std::size_t>(y)] = buffer.data() + static_cast<std::size_t>(y) * img.width;
    for (int x = 0; x < img.width; ++x) {
      const float v = std::clamp(img.at(x, y), 0.0f, 1.0f);
      buffer[static_cast<std::size_t>(y) * img.width + x] =
          static_cast<png_byte>(std::lround(v * 255.0f));
    }
  }
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace vanishkit
