#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace featrend {

enum class ErrorCode {
    DecodeError,
    PathNotFound,
    RepoNotFound,
    BranchNotFound,
    EmptyRepository,
    GitFailure,
    SchemaVersionMismatch,
    MalformedInput,
    InputMismatch,
    NoKotlinCommit,
    BadConfig,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Input bytes are not valid UTF-8. Reported per file, never fatal to a walk.
class DecodeError : public Error {
public:
    DecodeError(std::string path, std::size_t byte_offset)
        : Error(ErrorCode::DecodeError,
                path.empty() ? "invalid UTF-8 at byte " + std::to_string(byte_offset)
                             : path + ": invalid UTF-8 at byte " + std::to_string(byte_offset)),
          path_(std::move(path)),
          byte_offset_(byte_offset) {}

    const std::string& path() const { return path_; }
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::string path_;
    std::size_t byte_offset_;
};

} // namespace featrend
