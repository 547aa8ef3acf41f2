#ifndef DHC_H
#define DHC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#endif  /* DHC_H */
