/** Network builders: U-Net generator and patch-wise discriminator. */
import * as tf from '@tensorflow/tfjs';
import { GanConfig } from './config';

/** Seeded Glorot initializer; each call advances the seed deterministically. */
function makeInitializerFactory(seed: number) {
  let next = seed;
  return () => tf.initializers.glorotUniform({ seed: next++ });
}

/**
 * U-Net image-to-image generator: stride-2 convolution encoder, the
 * mirrored transposed-convolution decoder, and a skip connection
 * concatenating each encoder stage onto the decoder stage of the same
 * resolution. The innermost convolution is named `bottleneck` so tests
 * can silence it and observe what the skips alone carry. The final
 * activation is a sigmoid, so outputs always lie in [0,1].
 */
export function buildGenerator(config: GanConfig): tf.LayersModel {
  const init = makeInitializerFactory(config.seed);
  const size = config.imageSize;
  const input = tf.input({ shape: [size, size, 3], name: 'source' });

  const skips: tf.SymbolicTensor[] = [];
  let x = input;
  for (let d = 0; d < config.unetDepth; d++) {
    x = tf.layers.conv2d({
      filters: config.baseFilters << Math.min(d, 3),
      kernelSize: 4,
      strides: 2,
      padding: 'same',
      kernelInitializer: init(),
      name: `enc_${d}`,
    }).apply(x) as tf.SymbolicTensor;
    x = tf.layers.leakyReLU({ alpha: 0.2, name: `enc_act_${d}` })
      .apply(x) as tf.SymbolicTensor;
    skips.push(x);
  }

  x = tf.layers.conv2d({
    filters: config.baseFilters << Math.min(config.unetDepth - 1, 3),
    kernelSize: 3,
    strides: 1,
    padding: 'same',
    activation: 'relu',
    kernelInitializer: init(),
    name: 'bottleneck',
  }).apply(x) as tf.SymbolicTensor;

  for (let d = config.unetDepth - 1; d >= 0; d--) {
    x = tf.layers.concatenate({ name: `skip_${d}` })
      .apply([x, skips[d]]) as tf.SymbolicTensor;
    x = tf.layers.conv2dTranspose({
      filters: d > 0 ? config.baseFilters << Math.min(d - 1, 3) : config.baseFilters,
      kernelSize: 4,
      strides: 2,
      padding: 'same',
      activation: 'relu',
      kernelInitializer: init(),
      name: `dec_${d}`,
    }).apply(x) as tf.SymbolicTensor;
  }

  const output = tf.layers.conv2d({
    filters: 3,
    kernelSize: 3,
    padding: 'same',
    activation: 'sigmoid',
    kernelInitializer: init(),
    name: 'to_rgb',
  }).apply(x) as tf.SymbolicTensor;

  return tf.model({ inputs: input, outputs: output, name: 'generator' });
}

/**
 * Patch-wise conditional discriminator: the source and candidate images
 * are concatenated channel-wise and mapped through stride-2 convolutions
 * to a grid of per-patch real/fake logits (no global pooling).
 */
export function buildDiscriminator(config: GanConfig): tf.LayersModel {
  const init = makeInitializerFactory(config.seed + 10_000);
  const size = config.imageSize;
  const source = tf.input({ shape: [size, size, 3], name: 'source' });
  const candidate = tf.input({ shape: [size, size, 3], name: 'candidate' });

  let x = tf.layers.concatenate({ name: 'pair' })
    .apply([source, candidate]) as tf.SymbolicTensor;
  const stages = Math.min(3, config.unetDepth);
  for (let d = 0; d < stages; d++) {
    x = tf.layers.conv2d({
      filters: config.baseFilters << Math.min(d, 3),
      kernelSize: 4,
      strides: 2,
      padding: 'same',
      kernelInitializer: init(),
      name: `disc_${d}`,
    }).apply(x) as tf.SymbolicTensor;
    x = tf.layers.leakyReLU({ alpha: 0.2, name: `disc_act_${d}` })
      .apply(x) as tf.SymbolicTensor;
  }
  const logits = tf.layers.conv2d({
    filters: 1,
    kernelSize: 3,
    padding: 'same',
    kernelInitializer: init(),
    name: 'patch_logits',
  }).apply(x) as tf.SymbolicTensor;

  return tf.model({ inputs: [source, candidate], outputs: logits,
                    name: 'discriminator' });
}

/** Zero a named layer's weights in place (used to silence the bottleneck). */
export function zeroLayer(model: tf.LayersModel, layerName: string): void {
  const layer = model.getLayer(layerName);
  layer.setWeights(layer.getWeights().map(w => tf.zerosLike(w)));
}
