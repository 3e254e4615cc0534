#pragma once

#include <filesystem>
#include <fstream>
#include <string>

// Fresh scratch directory per test site; contents are overwritten freely.
inline std::string test_dir(const std::string& name) {
  const auto dir = std::filesystem::path("test_scratch") / name;
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline std::string write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  return path;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}
