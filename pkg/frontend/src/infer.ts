/** Inference conforming to the external-generator subprocess protocol:
 * read one RGB PNG, write a 256x256 RGB PNG, exit 0 on success. */
import * as tf from '@tensorflow/tfjs';
import { loadConfig, loadModel } from './checkpoint';
import { readPng, resizeTo, writePng } from './png';

export const PROTOCOL_SIZE = 256;

export async function inferCommand(ckptDir: string, inputPath: string,
                                   outputPath: string,
                                   stage: string): Promise<void> {
  const config = loadConfig(ckptDir);
  if (config.stage && stage && config.stage !== stage) {
    throw new Error(
      `checkpoint was trained for stage ${config.stage}, requested ${stage}`);
  }
  const generator = await loadModel(ckptDir, 'generator');
  const input = readPng(inputPath);
  const output = tf.tidy(() => {
    const scaled = resizeTo(input, config.imageSize);
    const batch = scaled.expandDims(0);
    const out = generator.apply(batch, { training: false }) as tf.Tensor4D;
    return resizeTo(out.squeeze([0]) as tf.Tensor3D, PROTOCOL_SIZE);
  });
  writePng(outputPath, output);
  input.dispose();
  output.dispose();
  generator.dispose();
}
