// Copyright 2026 The txoracle Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace txoracle {

enum class ErrorCode {
    kMalformedValue,
    kMalformedAbi,
    kUnknownSelector,
    kTruncatedCalldata,
    kUnknownEvent,
    kMalformedEventData,
    kUnsupportedType,
    kMalformedLayout,
    kMalformedRecord,
    kMalformedProperty,
    kNoStore,
    kDigestMismatch,
    kSchemaUnknown,
    kMalformedArtifact,
    kInvalidSpec,
    kUnsupportedScript,
    kConfig,
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::kMalformedValue: return "MalformedValue";
        case ErrorCode::kMalformedAbi: return "MalformedAbi";
        case ErrorCode::kUnknownSelector: return "UnknownSelector";
        case ErrorCode::kTruncatedCalldata: return "TruncatedCalldata";
        case ErrorCode::kUnknownEvent: return "UnknownEvent";
        case ErrorCode::kMalformedEventData: return "MalformedEventData";
        case ErrorCode::kUnsupportedType: return "UnsupportedType";
        case ErrorCode::kMalformedLayout: return "MalformedLayout";
        case ErrorCode::kMalformedRecord: return "MalformedRecord";
        case ErrorCode::kMalformedProperty: return "MalformedProperty";
        case ErrorCode::kNoStore: return "NoStore";
        case ErrorCode::kDigestMismatch: return "DigestMismatch";
        case ErrorCode::kSchemaUnknown: return "SchemaUnknown";
        case ErrorCode::kMalformedArtifact: return "MalformedArtifact";
        case ErrorCode::kInvalidSpec: return "InvalidSpec";
        case ErrorCode::kUnsupportedScript: return "UnsupportedScript";
        case ErrorCode::kConfig: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string{to_string(code)} + ": " + what), code_{code} {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace txoracle
