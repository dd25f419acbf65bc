#include "rehearse/annotation/annotation.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"

namespace rehearse::annotation {

std::string_view to_string(AnnotationSource source) {
    return source == AnnotationSource::UserSelected ? "user_selected" : "from_hint";
}

AnnotationSource annotation_source_from_string(std::string_view text) {
    if (text == "user_selected") return AnnotationSource::UserSelected;
    if (text == "from_hint") return AnnotationSource::FromHint;
    throw InvalidArgument("unknown annotation source: " + std::string(text));
}

void check_range(const TimeRange& range, const session::Transcript& transcript) {
    if (range.start_ms < 0 || range.end_ms < range.start_ms) {
        throw RangeOutOfBounds("range (" + std::to_string(range.start_ms) + ", " +
                               std::to_string(range.end_ms) + ") is inverted or negative");
    }
    if (range.end_ms > transcript.duration_ms()) {
        throw RangeOutOfBounds("range ends at " + std::to_string(range.end_ms) +
                               " ms, past the session end at " +
                               std::to_string(transcript.duration_ms()) + " ms");
    }
}

Annotation make_annotation(std::string annotation_id, std::string session_id,
                           const session::Transcript& transcript, TimeRange range,
                           std::string self_reflection, AnnotationSource source) {
    note_operation("create_annotation");
    check_range(range, transcript);
    return Annotation{std::move(annotation_id), std::move(session_id), range,
                      transcript.excerpt(range), std::move(self_reflection), source};
}

Annotation annotation_from_hint(std::string annotation_id, std::string session_id,
                                const session::Transcript& transcript, const Hint& hint,
                                std::string self_reflection) {
    return make_annotation(std::move(annotation_id), std::move(session_id), transcript, hint.range,
                           std::move(self_reflection), AnnotationSource::FromHint);
}

}  // namespace rehearse::annotation
