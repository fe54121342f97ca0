#include "msv/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "msv/error.hpp"

namespace msv {

namespace {

constexpr std::array<Rgb8, 10> kPalette = {{
    {230, 25, 75},
    {60, 180, 75},
    {0, 130, 200},
    {255, 225, 25},
    {245, 130, 48},
    {145, 30, 180},
    {70, 240, 240},
    {240, 50, 230},
    {210, 245, 60},
    {128, 128, 128},
}};

unsigned char to_byte(float v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

}  // namespace

InputTensor load_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw InputError("cannot read image '" + path.string() + "': no such file");
  }
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw InputError("cannot decode image '" + path.string() + "'");

  cv::Mat img;
  switch (raw.channels()) {
    case 1:
      img = raw;
      break;
    case 3:
      cv::cvtColor(raw, img, cv::COLOR_BGR2RGB);
      break;
    case 4:
      cv::cvtColor(raw, img, cv::COLOR_BGRA2RGB);
      break;
    default:
      throw InputError("unsupported channel count " + std::to_string(raw.channels()) + " in '" +
                       path.string() + "'");
  }
  // Integer samples become k / max exactly, so saved PNGs read back bit-equal.
  float divisor = 1.0f;
  switch (img.depth()) {
    case CV_8U:
      divisor = 255.0f;
      break;
    case CV_16U:
      divisor = 65535.0f;
      break;
    case CV_32F:
      break;
    default:
      throw InputError("unsupported pixel depth in '" + path.string() + "'");
  }
  cv::Mat f;
  img.convertTo(f, CV_32F);
  if (!f.isContinuous()) f = f.clone();
  const int c = f.channels();
  const auto* p = f.ptr<float>();
  std::vector<float> data(p, p + static_cast<std::size_t>(f.rows) * f.cols * c);
  if (divisor != 1.0f) {
    for (auto& v : data) v /= divisor;
  }
  return InputTensor(f.rows, f.cols, c, std::move(data));
}

void save_png(const std::filesystem::path& path, const InputTensor& image) {
  const int c = image.channels();
  if (c != 1 && c != 3) {
    throw InputError("PNG output needs 1 or 3 channels, got " + std::to_string(c));
  }
  cv::Mat bytes(image.height(), image.width(), c == 1 ? CV_8UC1 : CV_8UC3);
  const auto src = image.data();
  auto* dst = bytes.ptr<unsigned char>();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = to_byte(src[i]);
  if (c == 3) cv::cvtColor(bytes, bytes, cv::COLOR_RGB2BGR);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), bytes)) {
    throw InputError("cannot write image '" + path.string() + "'");
  }
}

Rgb8 palette_color(std::size_t view_index) { return kPalette[view_index % kPalette.size()]; }

InputTensor render_overlay(const InputTensor& x, const MsvSet& set, const OverlayOptions& opt) {
  const int h = x.height();
  const int w = x.width();
  const int scale = opt.scale > 0 ? opt.scale : std::max(1, (255 + std::max(h, w)) / std::max(h, w));
  const int out_w = w * scale;
  const int body_h = h * scale;
  const int out_h = body_h + opt.caption_height;

  // Base image as RGB bytes, tinted per view.
  cv::Mat base(h, w, CV_8UC3);
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      const Site s = static_cast<Site>(r * w + col);
      auto& px = base.at<cv::Vec3b>(r, col);
      for (int ch = 0; ch < 3; ++ch) {
        px[ch] = to_byte(x.at(s, x.channels() == 3 ? ch : 0));
      }
    }
  }
  for (std::size_t v = 0; v < set.views.size(); ++v) {
    const Rgb8 color = palette_color(v);
    const float rgb[3] = {float(color.r), float(color.g), float(color.b)};
    for (Site s : set.views[v].sites()) {
      auto& px = base.at<cv::Vec3b>(x.row(s), x.col(s));
      for (int ch = 0; ch < 3; ++ch) {
        const float mixed = opt.alpha * rgb[ch] + (1.0f - opt.alpha) * float(px[ch]);
        px[ch] = static_cast<unsigned char>(std::lround(mixed));
      }
    }
  }

  cv::Mat canvas(out_h, out_w, CV_8UC3, cv::Scalar(255, 255, 255));
  cv::Mat body;
  cv::resize(base, body, cv::Size(out_w, body_h), 0, 0, cv::INTER_NEAREST);
  body.copyTo(canvas(cv::Rect(0, 0, out_w, body_h)));

  std::string caption = "#MSVs: " + std::to_string(set.count());
  if (set.degenerate) caption += " (degenerate)";
  const double font_scale = std::min(0.6, std::max(0.3, out_w / 400.0));
  cv::putText(canvas, caption, cv::Point(4, body_h + opt.caption_height - 9),
              cv::FONT_HERSHEY_SIMPLEX, font_scale, cv::Scalar(0, 0, 0), 1, cv::LINE_8);

  std::vector<float> data(static_cast<std::size_t>(out_h) * out_w * 3);
  const auto* p = canvas.ptr<unsigned char>();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = float(p[i]) / 255.0f;
  return InputTensor(out_h, out_w, 3, std::move(data));
}

}  // namespace msv
