"""Relations, groupoids, measures and the convolution algebra."""
