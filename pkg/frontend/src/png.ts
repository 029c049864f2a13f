/** 8-bit RGB PNG files as [0,1] float image tensors. */
import * as fs from 'fs';
import * as tf from '@tensorflow/tfjs';
import { PNG } from 'pngjs';

/** Decode a PNG file into a (h, w, 3) tensor with values in [0,1]. */
export function readPng(path: string): tf.Tensor3D {
  const png = PNG.sync.read(fs.readFileSync(path));
  const n = png.width * png.height;
  const rgb = new Float32Array(n * 3);
  for (let i = 0; i < n; i++) {
    rgb[i * 3] = png.data[i * 4] / 255;
    rgb[i * 3 + 1] = png.data[i * 4 + 1] / 255;
    rgb[i * 3 + 2] = png.data[i * 4 + 2] / 255;
  }
  return tf.tensor3d(rgb, [png.height, png.width, 3]);
}

/** Write a (h, w, 3) tensor with values in [0,1] as an 8-bit RGB PNG. */
export function writePng(path: string, image: tf.Tensor3D): void {
  const [height, width] = image.shape;
  const data = image.dataSync();
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height; i++) {
    for (let c = 0; c < 3; c++) {
      const v = Math.min(1, Math.max(0, data[i * 3 + c]));
      png.data[i * 4 + c] = Math.round(v * 255);
    }
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(path, PNG.sync.write(png));
}

/** Bilinear-resize a (h, w, 3) tensor to a square side length. */
export function resizeTo(image: tf.Tensor3D, size: number): tf.Tensor3D {
  if (image.shape[0] === size && image.shape[1] === size) {
    return image;
  }
  return tf.tidy(() =>
    tf.image.resizeBilinear(image, [size, size], false, true)
      .clipByValue(0, 1) as tf.Tensor3D);
}
