#include "wildgan/video.hpp"

#include <opencv2/videoio.hpp>

#include "wildgan/error.hpp"

namespace wildgan {

std::vector<ImageTensor> extract_frames(const std::string& video_path, int stride) {
  if (stride < 1) throw ValidationError("extract_frames: stride must be >= 1");
  cv::VideoCapture cap(video_path);
  if (!cap.isOpened()) throw IoError("cannot open video: " + video_path);
  std::vector<ImageTensor> frames;
  cv::Mat m;
  for (int64_t idx = 0; cap.read(m); ++idx) {
    if (idx % stride != 0) continue;
    if (m.empty() || m.depth() != CV_8U || m.channels() < 3)
      throw IoError("undecodable frame " + std::to_string(idx) + " in " + video_path);
    ImageTensor img(m.rows, m.cols, 3);
    for (int y = 0; y < m.rows; ++y)
      for (int x = 0; x < m.cols; ++x) {
        const cv::Vec3b px = m.at<cv::Vec3b>(y, x);  // BGR
        img.at(y, x, 0) = px[2] / 127.5f - 1.0f;
        img.at(y, x, 1) = px[1] / 127.5f - 1.0f;
        img.at(y, x, 2) = px[0] / 127.5f - 1.0f;
      }
    frames.push_back(std::move(img));
  }
  return frames;
}

}  // namespace wildgan
