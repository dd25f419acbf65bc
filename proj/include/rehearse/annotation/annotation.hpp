#pragma once

#include "rehearse/annotation/hints.hpp"
#include "rehearse/session/transcript.hpp"

#include <string>
#include <string_view>

namespace rehearse::annotation {

enum class AnnotationSource { UserSelected, FromHint };

std::string_view to_string(AnnotationSource source);
AnnotationSource annotation_source_from_string(std::string_view text);

struct Annotation {
    std::string annotation_id;
    std::string session_id;
    TimeRange range;
    std::string excerpt;
    std::string self_reflection;
    AnnotationSource source = AnnotationSource::UserSelected;
    friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Throws RangeOutOfBounds unless 0 <= start <= end <= transcript duration.
void check_range(const TimeRange& range, const session::Transcript& transcript);

/// Builds an annotation whose excerpt is recomputed from `transcript`.
Annotation make_annotation(std::string annotation_id, std::string session_id,
                           const session::Transcript& transcript, TimeRange range,
                           std::string self_reflection,
                           AnnotationSource source = AnnotationSource::UserSelected);

/// Annotation covering exactly the hint's range.
Annotation annotation_from_hint(std::string annotation_id, std::string session_id,
                                const session::Transcript& transcript, const Hint& hint,
                                std::string self_reflection);

}  // namespace rehearse::annotation
