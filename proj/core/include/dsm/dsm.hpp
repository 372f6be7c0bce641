#ifndef DSM_DSM_HPP
#define DSM_DSM_HPP

#include "dsm/errors.hpp"
#include "dsm/flow.hpp"
#include "dsm/gallery.hpp"
#include "dsm/linalg.hpp"
#include "dsm/majorant.hpp"
#include "dsm/operator_model.hpp"
#include "dsm/path.hpp"
#include "dsm/planner.hpp"
#include "dsm/resolvent.hpp"
#include "dsm/schedule.hpp"
#include "dsm/serialize.hpp"
#include "dsm/types.hpp"

#endif
