#pragma once

#include <stdexcept>
#include <string>

namespace tanbound {

/// Error categories surfaced by the library. Hypothesis failures of the
/// certificates are not errors; they come back as invalid certificates
/// carrying a FailureReason.
enum class errc {
    not_square,
    not_hermitian,
    rank_deficient,
    dimension_mismatch,
    rank_mismatch,
    no_convergence,
    gap_nonpositive,
    empty_selection,
    parse_error,
    size_overflow,
    io_error,
    invalid_argument,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace tanbound
