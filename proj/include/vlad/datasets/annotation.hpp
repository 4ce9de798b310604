#pragma once

#include "vlad/graspx/rectangle.hpp"

namespace vlad::datasets {

enum class AnnotationSource { Human, Simulated };

struct GraspAnnotation {
    graspx::GraspRectangle rectangle;
    AnnotationSource source = AnnotationSource::Human;
};

}  // namespace vlad::datasets
