// Copyright 2026 The mind Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>

namespace mind::io {

// Invokes fn(line, line_number) for every non-blank line; line numbers are
// 1-based. Throws Error{kIo} when the file cannot be opened.
void for_each_line(
    const std::filesystem::path& path,
    const std::function<void(std::string_view, std::size_t)>& fn);

std::string read_file(const std::filesystem::path& path);

// Writes through a temporary sibling and renames over the target.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

// Line appender over a POSIX descriptor. Each append is one write(2) of
// the line plus '\n', followed by fsync when durable. Thread-safe.
class DurableAppender {
 public:
  DurableAppender() = default;
  DurableAppender(const std::filesystem::path& path, bool durable);
  ~DurableAppender();

  DurableAppender(const DurableAppender&) = delete;
  DurableAppender& operator=(const DurableAppender&) = delete;
  DurableAppender(DurableAppender&& other) noexcept;
  DurableAppender& operator=(DurableAppender&& other) noexcept;

  void append_line(std::string_view line);
  bool is_open() const { return fd_ >= 0; }
  const std::filesystem::path& path() const { return path_; }

 private:
  void close();

  std::filesystem::path path_;
  int fd_ = -1;
  bool durable_ = true;
  std::mutex mu_;
};

}  // namespace mind::io
